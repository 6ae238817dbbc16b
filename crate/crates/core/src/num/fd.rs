//! Central finite differences for gradients and Hessians of scalar fields.
//!
//! The default step is 1e-4 * (1 + |x_i|) per coordinate, balancing
//! truncation against round-off at double precision. `richardson_hessian`
//! runs the second-difference stencil at two step sizes and extrapolates,
//! which is needed where 1e-8 accuracy is required of the Hessian itself.

use nalgebra::DMatrix;

pub const DEFAULT_FD_STEP: f64 = 1e-4;

fn step_for(x: f64, scale: f64) -> f64 {
    scale * (1.0 + x.abs())
}

/// Central-difference gradient of `f` at `x`.
pub fn central_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], scale: f64) -> Vec<f64> {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let h = step_for(x[i], scale);
        xp[i] = x[i] + h;
        let fp = f(&xp);
        xp[i] = x[i] - h;
        let fm = f(&xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference Hessian of `f` at `x` with per-coordinate step
/// `scale * (1 + |x_i|)`. Symmetrized by construction.
pub fn central_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], scale: f64) -> DMatrix<f64> {
    let n = x.len();
    let f0 = f(x);
    let mut h = DMatrix::zeros(n, n);
    let mut xp = x.to_vec();
    for i in 0..n {
        let hi = step_for(x[i], scale);
        xp[i] = x[i] + hi;
        let fp = f(&xp);
        xp[i] = x[i] - hi;
        let fm = f(&xp);
        xp[i] = x[i];
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let hi = step_for(x[i], scale);
            let hj = step_for(x[j], scale);
            xp[i] = x[i] + hi;
            xp[j] = x[j] + hj;
            let fpp = f(&xp);
            xp[j] = x[j] - hj;
            let fpm = f(&xp);
            xp[i] = x[i] - hi;
            xp[j] = x[j] + hj;
            let fmp = f(&xp);
            xp[j] = x[j] - hj;
            let fmm = f(&xp);
            xp[i] = x[i];
            xp[j] = x[j];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// Richardson-extrapolated central Hessian: stencils at step `h` and `h/2`
/// combined as (4 A_{h/2} - A_h) / 3, killing the leading O(h^2) error.
pub fn richardson_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], scale: f64) -> DMatrix<f64> {
    let coarse = central_hessian(f, x, scale);
    let fine = central_hessian(f, x, scale * 0.5);
    (fine * 4.0 - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_quadratic() {
        let f = |x: &[f64]| x[0] * x[0] + 3.0 * x[0] * x[1];
        let g = central_gradient(&f, &[1.0, 2.0], DEFAULT_FD_STEP);
        assert!((g[0] - 8.0).abs() < 1e-8);
        assert!((g[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn hessian_of_smooth_function() {
        let f = |x: &[f64]| (x[0] * x[1]).cos();
        let x = [0.7, -0.3];
        let h = central_hessian(&f, &x, DEFAULT_FD_STEP);
        let (a, b) = (x[0], x[1]);
        let exact = [
            -b * b * (a * b).cos(),
            -(a * b).sin() - a * b * (a * b).cos(),
            -a * a * (a * b).cos(),
        ];
        assert!((h[(0, 0)] - exact[0]).abs() < 1e-6);
        assert!((h[(0, 1)] - exact[1]).abs() < 1e-6);
        assert!((h[(1, 1)] - exact[2]).abs() < 1e-6);
    }

    #[test]
    fn richardson_beats_plain_stencil() {
        let f = |x: &[f64]| x[0].exp() * (2.0 * x[0]).sin();
        let x = [0.4f64];
        let exact = {
            let e = x[0].exp();
            // d2/dx2 [e^x sin 2x] = e^x(sin 2x + 4 cos 2x - 4 sin 2x)
            e * ((2.0 * x[0]).sin() + 4.0 * (2.0 * x[0]).cos() - 4.0 * (2.0 * x[0]).sin())
        };
        let rich = richardson_hessian(&f, &x, 1e-2)[(0, 0)];
        assert!((rich - exact).abs() < 1e-8, "richardson err {}", (rich - exact).abs());
    }
}
