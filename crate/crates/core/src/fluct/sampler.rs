//! Sampling the cell-discretized Gaussian field: independent cells with
//! covariance pi''(theta(x_i)) / h (the discrete Dirac delta). Streams are
//! keyed by (seed, cell, sample index), so any subset of cells of any sample
//! is reproducible independently of evaluation order.

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::field::ControlField;
use crate::num::{normal_pair, keyed_rng, NeumaierSum};
use crate::thermo::Pressure;

use super::SmearFunction;

/// One realization of the field on the grid.
#[derive(Debug, Clone)]
pub struct FluctuationSample {
    pub xs: Vec<f64>,
    pub spacing: f64,
    /// xi_i per cell (n components each).
    pub xi: Vec<Vec<f64>>,
    pub sample_index: u64,
}

/// Prepared sampler: per-cell Cholesky factors of pi''(theta(x_i)) / h.
pub struct FieldSampler {
    field: ControlField,
    seed: u64,
    dim: usize,
    /// Lower Cholesky factor per cell.
    factors: Vec<DMatrix<f64>>,
}

impl FieldSampler {
    pub fn new(field: &ControlField, pressure: &dyn Pressure, seed: u64) -> Result<Self> {
        let n = field.dim();
        if pressure.dim() != n {
            return Err(CoreError::Input("pressure/field dimension mismatch".into()));
        }
        let h = field.spacing();
        let mut factors = Vec::with_capacity(field.cells());
        for (cell, theta) in field.thetas.iter().enumerate() {
            // a kink of pi (coexistence) leaves no usable covariance; the
            // scalar case is detected through the one-sided slopes
            if n == 1 {
                if let Err(CoreError::NonDifferentiable { left, right, .. }) =
                    crate::thermo::q_of_theta(pressure, &crate::thermo::ControlVariable(theta.clone()))
                {
                    return Err(CoreError::PhaseBoundary {
                        cell,
                        x: field.xs[cell],
                        detail: format!(
                            "pi is kinked at theta = {theta:?} (one-sided slopes {left} vs \
                             {right}): coexistence point, covariance undefined"
                        ),
                    });
                }
            }
            let cov = pressure.hessian(theta) / h;
            let finite = cov.iter().all(|v| v.is_finite());
            let chol = if finite { nalgebra::Cholesky::new(cov.clone()) } else { None };
            let chol = chol.ok_or_else(|| CoreError::PhaseBoundary {
                cell,
                x: field.xs[cell],
                detail: format!(
                    "pi''(theta) not positive definite at theta = {theta:?} \
                     (phase boundary or coexistence)"
                ),
            })?;
            factors.push(chol.l());
        }
        Ok(FieldSampler { field: field.clone(), seed, dim: n, factors })
    }

    pub fn cells(&self) -> usize {
        self.field.cells()
    }

    pub fn spacing(&self) -> f64 {
        self.field.spacing()
    }

    pub fn xs(&self) -> &[f64] {
        &self.field.xs
    }

    /// Covariance matrix used for cell `i` (before the 1/h delta factor).
    pub fn cell_covariance_times_h(&self, i: usize) -> DMatrix<f64> {
        let l = &self.factors[i];
        l * l.transpose() * self.spacing()
    }

    /// xi at one cell of one sample.
    pub fn draw_cell(&self, sample_index: u64, cell: usize) -> Vec<f64> {
        let mut rng = keyed_rng(self.seed, cell as u64, sample_index);
        let mut z = Vec::with_capacity(self.dim);
        while z.len() < self.dim {
            let (a, b) = normal_pair(&mut rng);
            z.push(a);
            if z.len() < self.dim {
                z.push(b);
            }
        }
        let l = &self.factors[cell];
        (0..self.dim)
            .map(|r| (0..=r.min(self.dim - 1)).map(|c| l[(r, c)] * z[c]).sum())
            .collect()
    }

    /// Full-grid realization.
    pub fn sample(&self, sample_index: u64) -> FluctuationSample {
        let xi = (0..self.cells()).map(|c| self.draw_cell(sample_index, c)).collect();
        FluctuationSample {
            xs: self.field.xs.clone(),
            spacing: self.spacing(),
            xi,
            sample_index,
        }
    }

    /// Smeared value xi(f) = sum_i h f(x_i) . xi_i computed over the support
    /// cells only (no full-field materialization).
    pub fn smear_draw(&self, f: &dyn SmearFunction, sample_index: u64) -> Result<f64> {
        let (lo, hi) = self.support_cells(f)?;
        let h = self.spacing();
        let mut acc = NeumaierSum::new();
        for cell in lo..=hi {
            let fv = f.eval(self.field.xs[cell]);
            let xi = self.draw_cell(sample_index, cell);
            let dot: f64 = fv.iter().zip(&xi).map(|(a, b)| a * b).sum();
            acc.add(h * dot);
        }
        Ok(acc.value())
    }

    /// Exact variance of xi(f) under the discrete covariance:
    /// sum_i h f(x_i) . pi''(theta_i) f(x_i).
    pub fn smear_variance_exact(&self, f: &dyn SmearFunction) -> Result<f64> {
        let (lo, hi) = self.support_cells(f)?;
        let h = self.spacing();
        let mut acc = NeumaierSum::new();
        for cell in lo..=hi {
            let fv = f.eval(self.field.xs[cell]);
            let cov_h = self.cell_covariance_times_h(cell);
            let mut quad = 0.0;
            for a in 0..self.dim {
                for b in 0..self.dim {
                    quad += fv[a] * cov_h[(a, b)] * fv[b];
                }
            }
            acc.add(h * quad);
        }
        Ok(acc.value())
    }

    fn support_cells(&self, f: &dyn SmearFunction) -> Result<(usize, usize)> {
        if f.dim() != self.dim {
            return Err(CoreError::Input("test-function dimension mismatch".into()));
        }
        let xs = &self.field.xs;
        let h = self.spacing();
        super::check_support_inside(f, xs[0] - 0.5 * h, xs[xs.len() - 1] + 0.5 * h)?;
        let (lo, hi) = f.support();
        let first = xs.partition_point(|&x| x < lo);
        let last = xs.partition_point(|&x| x <= hi).saturating_sub(1);
        if first > last {
            return Err(CoreError::Input("test-function support covers no cell".into()));
        }
        Ok((first, last))
    }
}

/// Smear one full-field sample against f (linearity makes this exactly the
/// sum of the per-cell contractions).
pub fn smear(sample: &FluctuationSample, f: &dyn SmearFunction) -> f64 {
    let mut acc = NeumaierSum::new();
    for (x, xi) in sample.xs.iter().zip(&sample.xi) {
        let fv = f.eval(*x);
        let dot: f64 = fv.iter().zip(xi).map(|(a, b)| a * b).sum();
        acc.add(sample.spacing * dot);
    }
    acc.value()
}
