//! 1-D optimization and root finding: golden-section search on concave
//! functions, bisection, and a damped Newton minimizer for smooth convex
//! functions of several variables.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximize a concave `f` on `[a, b]`: coarse scan to bracket the maximum,
/// then golden-section refinement down to `arg_tol` on the argument.
///
/// Returns `(x_max, f(x_max))`.
pub fn golden_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, arg_tol: f64) -> (f64, f64) {
    debug_assert!(b > a);
    // Coarse scan: concavity makes the discrete argmax bracket the true one.
    let n = 128usize;
    let h = (b - a) / n as f64;
    let mut best_i = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=n {
        let v = f(a + i as f64 * h);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let mut lo = a + best_i.saturating_sub(1) as f64 * h;
    let mut hi = (a + (best_i + 1) as f64 * h).min(b);

    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > arg_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    (xm, f(xm))
}

/// Bisection for a root of `f` on `[a, b]` with `f(a)` and `f(b)` of opposite
/// sign. Converges to `x_tol` on the argument.
pub fn bisect_root(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, x_tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(CoreError::Input(format!(
            "bisection bracket [{a}, {b}] does not straddle a root (f = {fa}, {fb})"
        )));
    }
    while b - a > x_tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Damped Newton minimization of a smooth strictly convex function.
///
/// `grad` and `hess` supply exact or numerically evaluated derivatives.
/// Iterates until the Newton decrement or gradient norm drops below `tol`.
pub fn newton_min_convex(
    grad: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    hess: &dyn Fn(&DVector<f64>) -> DMatrix<f64>,
    start: DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<DVector<f64>> {
    let mut x = start;
    for _ in 0..max_iter {
        let g = grad(&x);
        if g.norm() < tol {
            return Ok(x);
        }
        let h = hess(&x);
        let step = h
            .lu()
            .solve(&g)
            .ok_or_else(|| CoreError::Convergence("singular Hessian in Newton step".into()))?;
        // Backtracking on the gradient norm keeps the iteration inside the
        // region where the convex model is trustworthy.
        let mut t = 1.0;
        let g0 = g.norm();
        loop {
            let cand = &x - t * &step;
            if grad(&cand).norm() <= (1.0 - 0.25 * t) * g0 || t < 1e-8 {
                x = cand;
                break;
            }
            t *= 0.5;
        }
        if (t * step.norm()) < tol * (1.0 + x.norm()) {
            return Ok(x);
        }
    }
    let g = grad(&x);
    if g.norm() < tol * 100.0 {
        Ok(x)
    } else {
        Err(CoreError::Convergence(format!(
            "Newton failed to reach tolerance {tol}; gradient norm {}",
            g.norm()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_quadratic_max() {
        let (x, v) = golden_max(&|x: f64| -(x - 0.3) * (x - 0.3), -3.0, 3.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v.abs() < 1e-16);
    }

    #[test]
    fn golden_handles_boundary_max() {
        let (x, _) = golden_max(&|x: f64| x, 0.0, 1.0, 1e-12);
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_finds_tanh_root() {
        let r = bisect_root(&|x: f64| x.tanh() - 0.5, -5.0, 5.0, 1e-14).unwrap();
        assert!((r - 0.5f64.atanh()).abs() < 1e-12);
    }

    #[test]
    fn newton_minimizes_quadratic_form() {
        let grad = |x: &DVector<f64>| {
            DVector::from_vec(vec![2.0 * x[0] + x[1] - 1.0, x[0] + 4.0 * x[1] + 2.0])
        };
        let hess =
            |_: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 4.0]);
        let x = newton_min_convex(&grad, &hess, DVector::zeros(2), 1e-12, 50).unwrap();
        assert!(grad(&x).norm() < 1e-10);
    }
}
