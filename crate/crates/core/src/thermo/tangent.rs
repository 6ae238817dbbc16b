//! Tangent sets of the convex reduced pressure: the subdifferential interval
//! at a tabulated control value, whose extremal slopes mark the pure phases
//! and whose negation is the set of equilibrium densities.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

use super::conjugate::KINK_TOL;
use super::types::TabulatedPressure;

/// Subdifferential of pi at a control value theta (1-D).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentSet {
    pub theta: f64,
    /// Slope interval [r_min, r_max]; degenerate (r_min == r_max) where pi is
    /// differentiable.
    pub r_min: f64,
    pub r_max: f64,
    /// True when the interval is a single point within the kink tolerance.
    pub degenerate: bool,
}

impl TangentSet {
    /// Extremal slopes: both endpoints, or the single slope when degenerate.
    pub fn extremal_slopes(&self) -> Vec<f64> {
        if self.degenerate {
            vec![0.5 * (self.r_min + self.r_max)]
        } else {
            vec![self.r_min, self.r_max]
        }
    }

    /// Equilibrium densities -[r_min, r_max], returned as (lower, upper).
    pub fn density_interval(&self) -> (f64, f64) {
        (-self.r_max, -self.r_min)
    }

    /// Pure-phase densities: the negated extremal slopes.
    pub fn extremal_densities(&self) -> Vec<f64> {
        self.extremal_slopes().iter().map(|r| -r).collect()
    }

    pub fn contains_slope(&self, r: f64, tol: f64) -> bool {
        r >= self.r_min - tol && r <= self.r_max + tol
    }
}

/// One-sided slope from the two nearest grid intervals. A difference
/// quotient approximates the derivative at the interval midpoint, so the
/// extrapolation to the grid point itself is 1.5 s1 - 0.5 s2 (half a step
/// past the nearest quotient, exact for smooth pi up to O(h^2)).
fn one_sided_slope(grid: &[f64], values: &[f64], k: usize, right: bool) -> f64 {
    let q = |a: usize, b: usize| (values[b] - values[a]) / (grid[b] - grid[a]);
    if right {
        let s1 = q(k, k + 1);
        let s2 = q(k + 1, k + 2);
        1.5 * s1 - 0.5 * s2
    } else {
        let s1 = q(k - 1, k);
        let s2 = q(k - 2, k - 1);
        1.5 * s1 - 0.5 * s2
    }
}

/// Subdifferential interval of a tabulated pressure at a grid value theta.
///
/// Endpoints are one-sided difference quotients extrapolated over the two
/// nearest grid intervals on each side. The interval collapses to a point
/// when the two sides agree within the kink tolerance.
pub fn tangent_set(pi: &TabulatedPressure, theta: f64) -> Result<TangentSet> {
    let grid = pi.grid();
    let values = pi.values();
    let k = pi.index_of(theta)?;
    if k < 2 || k + 2 >= grid.len() {
        return Err(CoreError::InsufficientData(format!(
            "theta = {theta} too close to the tabulated edge for one-sided slopes"
        )));
    }
    let left = one_sided_slope(grid, values, k, false);
    let right = one_sided_slope(grid, values, k, true);
    // Convexity puts left <= right up to extrapolation noise.
    let (r_min, r_max) = if left <= right { (left, right) } else { (right, left) };
    let degenerate = (r_max - r_min).abs() <= KINK_TOL * (1.0 + r_min.abs().max(r_max.abs()));
    Ok(TangentSet { theta, r_min, r_max, degenerate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::envelope::concave_envelope;
    use crate::thermo::types::TabulatedPressure;

    /// pi for the double-well envelope, tabulated by conjugation.
    fn double_well_pressure() -> TabulatedPressure {
        let n = 401;
        let grid: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&q| -(q * q - 1.0) * (q * q - 1.0)).collect();
        let env = concave_envelope(&grid, &vals).unwrap();
        let theta_grid: Vec<f64> = (0..501).map(|i| -2.5 + 5.0 * i as f64 / 500.0).collect();
        TabulatedPressure::from_entropy(&env, theta_grid).unwrap()
    }

    #[test]
    fn double_well_interval_at_zero() {
        let pi = double_well_pressure();
        let ts = tangent_set(&pi, 0.0).unwrap();
        assert!(!ts.degenerate);
        // slopes [-1, 1] within two grid spacings (0.02)
        assert!((ts.r_min + 1.0).abs() < 0.02, "r_min = {}", ts.r_min);
        assert!((ts.r_max - 1.0).abs() < 0.02, "r_max = {}", ts.r_max);
        let dens = ts.extremal_densities();
        assert!((dens[0].abs() - 1.0).abs() < 0.02 && (dens[1].abs() - 1.0).abs() < 0.02);
    }

    #[test]
    fn smooth_pressure_degenerates() {
        // pi = theta^2/2 tabulated exactly
        let grid: Vec<f64> = (0..201).map(|i| -1.0 + i as f64 * 0.01).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| 0.5 * t * t).collect();
        let pi = TabulatedPressure::new(grid, vals).unwrap();
        let ts = tangent_set(&pi, 0.0).unwrap();
        assert!(ts.degenerate, "interval [{}, {}]", ts.r_min, ts.r_max);
        assert!(ts.r_min.abs() < 1e-10 && ts.r_max.abs() < 1e-10);
    }

    #[test]
    fn tabulated_paramagnet_degenerates_at_tanh_slope() {
        use crate::models::ParamagnetModel;
        use crate::thermo::types::Pressure;
        let pm = ParamagnetModel::new(1.0);
        let grid: Vec<f64> = (0..=400).map(|i| -2.0 + 4.0 * i as f64 / 400.0).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| pm.pressure().eval(&[t])).collect();
        let tab = TabulatedPressure::new(grid, vals).unwrap();
        let ts = tangent_set(&tab, 1.0).unwrap();
        assert!(ts.degenerate, "[{}, {}]", ts.r_min, ts.r_max);
        let slope = 0.5 * (ts.r_min + ts.r_max);
        assert!((slope - 1.0f64.tanh()).abs() < 1e-4, "slope {slope}");
    }

    #[test]
    fn edge_query_rejected() {
        let pi = double_well_pressure();
        assert!(matches!(
            tangent_set(&pi, -2.5),
            Err(CoreError::InsufficientData(_))
        ));
    }
}
