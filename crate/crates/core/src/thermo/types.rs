use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::num::{central_gradient, central_hessian, fd::DEFAULT_FD_STEP};

/// Conserved-density vector q = (q_1, ..., q_n); q_1 is the energy density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDensity(pub Vec<f64>);

impl StateDensity {
    pub fn scalar(e: f64) -> Self {
        StateDensity(vec![e])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Energy density (first component).
    pub fn energy(&self) -> f64 {
        self.0[0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Control variable theta = s'(q); theta_1 = 1/T and theta_j = f_j / T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlVariable(pub Vec<f64>);

impl ControlVariable {
    pub fn scalar(t1: f64) -> Self {
        ControlVariable(vec![t1])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Inverse temperature.
    pub fn beta(&self) -> f64 {
        self.0[0]
    }

    /// Temperature T = 1/theta_1; requires theta_1 > 0.
    pub fn temperature(&self) -> Result<f64> {
        if self.0[0] <= 0.0 {
            return Err(CoreError::Domain(format!(
                "temperature undefined: theta_1 = {} is not positive",
                self.0[0]
            )));
        }
        Ok(1.0 / self.0[0])
    }

    /// Conjugate forces f_j = theta_j / theta_1 for j >= 2.
    pub fn forces(&self) -> Result<Vec<f64>> {
        let t = self.temperature()?;
        Ok(self.0[1..].iter().map(|&tj| tj * t).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Axis-aligned box domain; components may be unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Domain { lower: vec![lo], upper: vec![hi] }
    }

    pub fn unbounded(n: usize) -> Self {
        Domain { lower: vec![f64::NEG_INFINITY; n], upper: vec![f64::INFINITY; n] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi && v.is_finite())
    }

    /// Strict interior membership with a relative margin.
    pub fn contains_interior(&self, x: &[f64], margin: f64) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lower.iter().zip(&self.upper)).all(|(&v, (&lo, &hi))| {
                let m = margin * (1.0 + hi.min(1e300) - lo.max(-1e300)).abs().min(1.0).max(margin);
                (lo == f64::NEG_INFINITY || v > lo + m) && (hi == f64::INFINITY || v < hi - m)
            })
    }
}

/// How an entropy or pressure is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    ClosedForm,
    Tabulated,
    NumericConjugate,
}

/// Concave entropy density s(q) on a convex domain.
///
/// `grad` and `hessian` default to central finite differences; closed-form
/// models override them.
pub trait Entropy: Send + Sync {
    fn dim(&self) -> usize;
    fn domain(&self) -> Domain;
    fn eval(&self, q: &[f64]) -> f64;
    fn representation(&self) -> Representation;

    fn grad(&self, q: &[f64]) -> Vec<f64> {
        central_gradient(&|x: &[f64]| self.eval(x), q, DEFAULT_FD_STEP)
    }

    fn hessian(&self, q: &[f64]) -> DMatrix<f64> {
        central_hessian(&|x: &[f64]| self.eval(x), q, DEFAULT_FD_STEP)
    }
}

/// Convex reduced pressure pi(theta) = sup_q (s(q) - theta.q) = p/T.
pub trait Pressure: Send + Sync {
    fn dim(&self) -> usize;
    /// Control space Theta on which pi is finite.
    fn control_space(&self) -> Domain;
    fn eval(&self, theta: &[f64]) -> f64;
    fn representation(&self) -> Representation;

    fn grad(&self, theta: &[f64]) -> Vec<f64> {
        central_gradient(&|x: &[f64]| self.eval(x), theta, DEFAULT_FD_STEP)
    }

    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        central_hessian(&|x: &[f64]| self.eval(x), theta, DEFAULT_FD_STEP)
    }
}

/// 1-D entropy tabulated on a monotone grid, evaluated by linear
/// interpolation. The concave envelope constructor returns this type.
#[derive(Debug, Clone)]
pub struct TabulatedEntropy {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedEntropy {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 3 {
            return Err(CoreError::Input(format!(
                "tabulated entropy needs at least 3 grid points, got {}",
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
            return Err(CoreError::Input("tabulated values must be finite".into()));
        }
        Ok(TabulatedEntropy { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn locate(&self, x: f64) -> usize {
        match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.grid.len() - 2),
        }
    }

    /// Two-column CSV (q, s).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,s\n");
        for (g, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{g:.17e},{v:.17e}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (k, line) in text.lines().enumerate() {
            if k == 0 && line.starts_with("q,") {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let (a, b) = (cols.next(), cols.next());
            match (a.and_then(|v| v.parse().ok()), b.and_then(|v| v.parse().ok())) {
                (Some(q), Some(s)) => {
                    grid.push(q);
                    values.push(s);
                }
                _ => return Err(CoreError::Input(format!("bad CSV line {}: {line}", k + 1))),
            }
        }
        TabulatedEntropy::new(grid, values)
    }
}

impl Entropy for TabulatedEntropy {
    fn dim(&self) -> usize {
        1
    }

    fn domain(&self) -> Domain {
        Domain::interval(self.grid[0], *self.grid.last().unwrap())
    }

    fn eval(&self, q: &[f64]) -> f64 {
        let x = q[0];
        let i = self.locate(x);
        let t = (x - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    fn representation(&self) -> Representation {
        Representation::Tabulated
    }
}

/// 1-D reduced pressure tabulated on a theta grid (input to tangent sets).
#[derive(Debug, Clone)]
pub struct TabulatedPressure {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedPressure {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 5 {
            return Err(CoreError::Input(format!(
                "tabulated pressure needs at least 5 grid points, got {}",
                grid.len()
            )));
        }
        if grid.len() != values.len() {
            return Err(CoreError::Input("grid/value length mismatch".into()));
        }
        if !grid.windows(2).all(|w| w[1] > w[0]) {
            return Err(CoreError::Input("grid must be strictly increasing".into()));
        }
        Ok(TabulatedPressure { grid, values })
    }

    /// Tabulate a pressure by conjugating an entropy on the given theta grid.
    pub fn from_entropy(s: &dyn Entropy, theta_grid: Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(theta_grid.len());
        for &t in &theta_grid {
            let (pi, _) = super::conjugate::legendre_transform(
                s,
                &ControlVariable::scalar(t),
            )?;
            values.push(pi);
        }
        TabulatedPressure::new(theta_grid, values)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Index of the grid point equal to `theta` (within a half-spacing).
    pub fn index_of(&self, theta: f64) -> Result<usize> {
        let i = match self.grid.binary_search_by(|g| g.total_cmp(&theta)) {
            Ok(i) => i,
            Err(i) => {
                if i == 0 || i >= self.grid.len() {
                    return Err(CoreError::InsufficientData(format!(
                        "theta = {theta} outside tabulated range [{}, {}]",
                        self.grid[0],
                        self.grid.last().unwrap()
                    )));
                }
                if (self.grid[i] - theta).abs() < (theta - self.grid[i - 1]).abs() {
                    i
                } else {
                    i - 1
                }
            }
        };
        let spacing = self.grid[i.min(self.grid.len() - 2) + 1] - self.grid[i.min(self.grid.len() - 2)];
        if (self.grid[i] - theta).abs() > 0.5 * spacing + 1e-12 {
            return Err(CoreError::InsufficientData(format!(
                "theta = {theta} is not a tabulated grid point (nearest {})",
                self.grid[i]
            )));
        }
        Ok(i)
    }
}

impl TabulatedPressure {
    /// Two-column CSV (theta, pi).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,pi\n");
        for (g, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{g:.17e},{v:.17e}\n"));
        }
        out
    }
}

impl Pressure for TabulatedPressure {
    fn dim(&self) -> usize {
        1
    }

    fn control_space(&self) -> Domain {
        Domain::interval(self.grid[0], *self.grid.last().unwrap())
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        let x = theta[0];
        let i = match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.grid.len() - 2),
        };
        let t = (x - self.grid[i]) / (self.grid[i + 1] - self.grid[i]);
        self.values[i] + t * (self.values[i + 1] - self.values[i])
    }

    fn representation(&self) -> Representation {
        Representation::Tabulated
    }
}
