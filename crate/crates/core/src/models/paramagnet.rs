//! Two-level paramagnet with level splitting epsilon: per-site energies
//! {-eps, +eps}, so
//!
//!   pi(theta) = ln(2 cosh(theta * eps)),   e(theta) = -eps tanh(theta * eps),
//!   s(e) = -p ln p - (1-p) ln(1-p)  with  p = (1 + e/eps)/2,
//!   s''(e) = -1/(eps^2 - e^2),      pi''(theta) = eps^2 sech^2(theta * eps).

use nalgebra::DMatrix;

use crate::thermo::{Domain, Entropy, Pressure, Representation};

#[derive(Debug, Clone, Copy)]
pub struct ParamagnetModel {
    pub epsilon: f64,
}

impl ParamagnetModel {
    pub fn new(epsilon: f64) -> Self {
        assert!(epsilon > 0.0, "level splitting must be positive");
        ParamagnetModel { epsilon }
    }

    pub fn entropy(&self) -> ParamagnetEntropy {
        ParamagnetEntropy { epsilon: self.epsilon }
    }

    pub fn pressure(&self) -> ParamagnetPressure {
        ParamagnetPressure { epsilon: self.epsilon }
    }

    /// Equilibrium energy density at control value theta.
    pub fn energy(&self, theta: f64) -> f64 {
        -self.epsilon * (theta * self.epsilon).tanh()
    }

    /// Dense per-site energies, the microscopic two-level realization.
    pub fn site_levels(&self) -> [f64; 2] {
        [-self.epsilon, self.epsilon]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamagnetEntropy {
    epsilon: f64,
}

impl Entropy for ParamagnetEntropy {
    fn dim(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        Domain::interval(-self.epsilon, self.epsilon)
    }

    fn eval(&self, q: &[f64]) -> f64 {
        let x = q[0] / self.epsilon;
        let p = 0.5 * (1.0 + x);
        let xlx = |p: f64| if p <= 0.0 { 0.0 } else { p * p.ln() };
        -(xlx(p) + xlx(1.0 - p))
    }

    fn grad(&self, q: &[f64]) -> Vec<f64> {
        let x = q[0] / self.epsilon;
        vec![-x.atanh() / self.epsilon]
    }

    fn hessian(&self, q: &[f64]) -> DMatrix<f64> {
        let e = q[0];
        DMatrix::from_element(1, 1, -1.0 / (self.epsilon * self.epsilon - e * e))
    }

    fn representation(&self) -> Representation {
        Representation::ClosedForm
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ParamagnetPressure {
    epsilon: f64,
}

impl Pressure for ParamagnetPressure {
    fn dim(&self) -> usize {
        1
    }

    fn control_space(&self) -> Domain {
        Domain::unbounded(1)
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        let a = theta[0] * self.epsilon;
        // ln(2 cosh a) computed overflow-safe as |a| + ln(1 + e^{-2|a|})
        a.abs() + (-2.0 * a.abs()).exp().ln_1p()
    }

    fn grad(&self, theta: &[f64]) -> Vec<f64> {
        vec![self.epsilon * (theta[0] * self.epsilon).tanh()]
    }

    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let c = (theta[0] * self.epsilon).cosh();
        DMatrix::from_element(1, 1, self.epsilon * self.epsilon / (c * c))
    }

    fn representation(&self) -> Representation {
        Representation::ClosedForm
    }
}
