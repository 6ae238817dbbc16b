//! Mesoscopic level: the Gaussian fluctuation field xi with cell-local
//! covariance pi''(theta(x, t)) delta(x - x'), compact-support polynomial
//! test functions, smeared-field statistics and punctual-limit checks.

mod checks;
mod sampler;

pub use checks::{
    characteristic_estimate, punctual_covariance_check, sample_moments, scaling_invariance_check,
    smear_samples, CharacteristicEstimate, PunctualReport, PunctualRow, SampleMoments,
    ScalingReport,
};
pub use sampler::{smear, FieldSampler, FluctuationSample};

use crate::error::{CoreError, Result};

/// Compact-support polynomial bump w * (1 - u^2)^2 with u = (x - center)/radius.
/// Vanishes with its first derivative at the support edge. The squared
/// integral of the unit-weight shape is 256/315.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub center: f64,
    pub radius: f64,
    /// Componentwise weights (dimension of the field).
    pub weights: Vec<f64>,
}

/// Integral of (1 - u^2)^4 over [-1, 1].
pub const BUMP_L2_SQ: f64 = 256.0 / 315.0;

impl TestFunction {
    pub fn unit_bump(center: f64, radius: f64, dim: usize) -> Self {
        TestFunction { center, radius, weights: vec![1.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    fn shape(u: f64) -> f64 {
        if u.abs() >= 1.0 {
            0.0
        } else {
            let v = 1.0 - u * u;
            v * v
        }
    }
}

/// Punctual-probe rescaling f -> eps^(-d/2) f(eps^(-1)(x - x0)) in d = 1;
/// preserves the squared integral exactly in the continuum.
#[derive(Debug, Clone)]
pub struct ScaledTestFunction {
    pub base: TestFunction,
    pub x0: f64,
    pub eps: f64,
}

/// Anything that can be smeared against the field.
pub trait SmearFunction: Send + Sync {
    fn dim(&self) -> usize;
    /// Componentwise values at x.
    fn eval(&self, x: f64) -> Vec<f64>;
    /// Support interval.
    fn support(&self) -> (f64, f64);
}

impl SmearFunction for TestFunction {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, x: f64) -> Vec<f64> {
        let g = Self::shape((x - self.center) / self.radius);
        self.weights.iter().map(|w| w * g).collect()
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.radius, self.center + self.radius)
    }
}

impl SmearFunction for ScaledTestFunction {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn eval(&self, x: f64) -> Vec<f64> {
        let scale = self.eps.sqrt().recip();
        let u = (x - self.x0) / self.eps;
        self.base.eval(self.base.center + u * self.base.radius).iter().map(|v| v * scale).collect()
    }

    fn support(&self) -> (f64, f64) {
        (self.x0 - self.eps, self.x0 + self.eps)
    }
}

/// Check that the support sits inside the domain covered by the grid.
pub fn check_support_inside(f: &dyn SmearFunction, x_min: f64, x_max: f64) -> Result<()> {
    let (lo, hi) = f.support();
    if lo < x_min - 1e-12 || hi > x_max + 1e-12 {
        return Err(CoreError::Input(format!(
            "test-function support [{lo}, {hi}] clipped by the domain [{x_min}, {x_max}]"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_l2_norm_matches_closed_form() {
        // grid quadrature of the unit bump against 256/315
        let f = TestFunction::unit_bump(0.0, 1.0, 1);
        let n = 20000;
        let h = 2.0 / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * h;
            let v = f.eval(x)[0];
            sum += h * v * v;
        }
        assert!((sum - BUMP_L2_SQ).abs() < 1e-10, "norm^2 = {sum}");
    }

    #[test]
    fn scaling_preserves_l2_norm() {
        let base = TestFunction::unit_bump(0.0, 1.0, 1);
        for eps in [0.5, 0.25, 0.1] {
            let f = ScaledTestFunction { base: base.clone(), x0: 0.5, eps };
            let n = 40000;
            let h = 2.0 * eps / n as f64;
            let mut sum = 0.0;
            for i in 0..n {
                let x = 0.5 - eps + (i as f64 + 0.5) * h;
                let v = f.eval(x)[0];
                sum += h * v * v;
            }
            assert!((sum - BUMP_L2_SQ).abs() < 1e-8, "eps {eps}: norm^2 = {sum}");
        }
    }

    #[test]
    fn clipped_support_rejected() {
        let f = TestFunction::unit_bump(0.1, 0.3, 1);
        assert!(check_support_inside(&f, 0.0, 1.0).is_err());
        let ok = TestFunction::unit_bump(0.5, 0.3, 1);
        assert!(check_support_inside(&ok, 0.0, 1.0).is_ok());
    }
}
