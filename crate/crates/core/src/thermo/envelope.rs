//! Least concave majorant of tabulated data (the double application of the
//! Legendre sup). Used to build coexistence test models from non-concave
//! raw entropies.

use crate::error::{CoreError, Result};

use super::types::TabulatedEntropy;

/// Concave envelope of values tabulated on a strictly increasing grid.
///
/// The envelope is the upper convex hull of the points `(grid_i, values_i)`,
/// re-sampled back onto the grid by linear interpolation along hull facets.
/// It touches the data at the hull's contact points and is affine between
/// them; where the input is already concave the output equals the input.
pub fn concave_envelope(grid: &[f64], values: &[f64]) -> Result<TabulatedEntropy> {
    if grid.len() < 3 {
        return Err(CoreError::Input(format!(
            "concave envelope needs at least 3 grid points, got {}",
            grid.len()
        )));
    }
    if grid.len() != values.len() {
        return Err(CoreError::Input("grid/value length mismatch".into()));
    }
    if !grid.windows(2).all(|w| w[1] > w[0]) {
        return Err(CoreError::Input("grid must be strictly increasing".into()));
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(CoreError::Input("values must be finite".into()));
    }

    // Upper hull by monotone chain: pop while the turn is not convex-down.
    let mut hull: Vec<usize> = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (grid[b] - grid[a]) * (values[i] - values[a])
                - (grid[i] - grid[a]) * (values[b] - values[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }

    let mut env = vec![0.0; grid.len()];
    let mut seg = 0usize;
    for i in 0..grid.len() {
        while seg + 1 < hull.len() && grid[hull[seg + 1]] < grid[i] {
            seg += 1;
        }
        let (a, b) = (hull[seg], hull[(seg + 1).min(hull.len() - 1)]);
        if a == b || grid[i] <= grid[a] {
            env[i] = values[a];
        } else {
            let t = (grid[i] - grid[a]) / (grid[b] - grid[a]);
            env[i] = values[a] + t * (values[b] - values[a]);
        }
    }

    TabulatedEntropy::new(grid.to_vec(), env)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_well(n: usize) -> (Vec<f64>, Vec<f64>) {
        let grid: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&q| -(q * q - 1.0) * (q * q - 1.0)).collect();
        (grid, vals)
    }

    #[test]
    fn double_well_envelope_is_flat_between_wells() {
        let (grid, vals) = double_well(401);
        let env = concave_envelope(&grid, &vals).unwrap();
        // flat zero on [-1, 1], equal to the raw entropy outside
        for (q, (&g, &v)) in grid.iter().zip(env.grid().iter().zip(env.values())) {
            assert_eq!(*q, g);
            if q.abs() <= 1.0 {
                assert!(v.abs() < 1e-12, "envelope({q}) = {v}");
            } else {
                let raw = -(q * q - 1.0) * (q * q - 1.0);
                assert!((v - raw).abs() < 1e-12, "envelope({q}) = {v}, raw = {raw}");
            }
        }
        // raw value at the midpoint is -1 while the envelope sits at 0
        let mid = env.values()[200];
        assert!(mid.abs() < 1e-12);
        assert!((vals[200] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn concave_input_is_fixed_point() {
        let grid: Vec<f64> = (0..101).map(|i| -3.0 + 6.0 * i as f64 / 100.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&q| -0.5 * q * q).collect();
        let env = concave_envelope(&grid, &vals).unwrap();
        for (a, b) in vals.iter().zip(env.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_is_idempotent() {
        let (grid, vals) = double_well(301);
        let once = concave_envelope(&grid, &vals).unwrap();
        let twice = concave_envelope(once.grid(), once.values()).unwrap();
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(concave_envelope(&[0.0, 1.0], &[0.0, 0.0]).is_err());
    }
}
