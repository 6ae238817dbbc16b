//! Gaussian toy model: s(q) = -q^2/2 on [-3, 3], conjugate pi = theta^2/2.
//! Every duality identity is exact, which makes it the reference point of the
//! numeric-conjugation tests and the linear case of the hydro solver.

use nalgebra::DMatrix;

use crate::thermo::{Domain, Entropy, Pressure, Representation};

#[derive(Debug, Clone, Copy)]
pub struct QuadraticModel {
    pub half_width: f64,
}

impl Default for QuadraticModel {
    fn default() -> Self {
        QuadraticModel { half_width: 3.0 }
    }
}

impl QuadraticModel {
    pub fn entropy(&self) -> QuadraticEntropy {
        QuadraticEntropy { half_width: self.half_width }
    }

    pub fn pressure(&self) -> QuadraticPressure {
        QuadraticPressure
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadraticEntropy {
    half_width: f64,
}

impl Entropy for QuadraticEntropy {
    fn dim(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        Domain::interval(-self.half_width, self.half_width)
    }

    fn eval(&self, q: &[f64]) -> f64 {
        -0.5 * q[0] * q[0]
    }

    fn grad(&self, q: &[f64]) -> Vec<f64> {
        vec![-q[0]]
    }

    fn hessian(&self, _q: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, -1.0)
    }

    fn representation(&self) -> Representation {
        Representation::ClosedForm
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadraticPressure;

impl Pressure for QuadraticPressure {
    fn dim(&self) -> usize {
        1
    }

    fn control_space(&self) -> Domain {
        Domain::unbounded(1)
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        0.5 * theta[0] * theta[0]
    }

    fn grad(&self, theta: &[f64]) -> Vec<f64> {
        vec![theta[0]]
    }

    fn hessian(&self, _theta: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, 1.0)
    }

    fn representation(&self) -> Representation {
        Representation::ClosedForm
    }
}
