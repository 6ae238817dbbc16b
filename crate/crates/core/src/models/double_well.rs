//! Coexistence test bed: raw non-concave s0(q) = -(q^2 - 1)^2 on [-2, 2]
//! whose effective entropy is the concave envelope, flat exactly on [-1, 1].
//! The flat stretch produces a kink of pi at theta = 0 with subdifferential
//! [-1, 1] and pure-phase densities {-1, +1}.

use crate::error::Result;
use crate::thermo::{concave_envelope, TabulatedEntropy, TabulatedPressure};

#[derive(Debug, Clone)]
pub struct DoubleWellEntropyModel {
    grid: Vec<f64>,
    raw: Vec<f64>,
}

impl DoubleWellEntropyModel {
    /// Raw double well tabulated on `points` grid nodes over [-2, 2].
    pub fn new(points: usize) -> Self {
        let n = points.max(3);
        let grid: Vec<f64> =
            (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let raw: Vec<f64> = grid.iter().map(|&q| -(q * q - 1.0) * (q * q - 1.0)).collect();
        DoubleWellEntropyModel { grid, raw }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn raw_values(&self) -> &[f64] {
        &self.raw
    }

    /// Effective (concave-envelope) entropy.
    pub fn entropy(&self) -> Result<TabulatedEntropy> {
        concave_envelope(&self.grid, &self.raw)
    }

    /// Reduced pressure tabulated by conjugating the envelope on a theta grid.
    pub fn tabulated_pressure(&self, theta_points: usize, theta_max: f64) -> Result<TabulatedPressure> {
        let env = self.entropy()?;
        let n = theta_points.max(5);
        let grid: Vec<f64> = (0..n)
            .map(|i| -theta_max + 2.0 * theta_max * i as f64 / (n - 1) as f64)
            .collect();
        TabulatedPressure::from_entropy(&env, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::Entropy;

    #[test]
    fn envelope_flat_on_unit_interval() {
        let m = DoubleWellEntropyModel::new(401);
        let env = m.entropy().unwrap();
        assert!(env.eval(&[0.0]).abs() < 1e-12);
        assert!(env.eval(&[0.5]).abs() < 1e-12);
        assert!((env.eval(&[1.5]) - (-(1.5f64 * 1.5 - 1.0).powi(2))).abs() < 1e-12);
    }
}
