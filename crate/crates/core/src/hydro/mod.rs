//! Macroscopic level: finite-volume integration of the conservation law
//! dq/dt + div j = 0 with the linear-irreversible flux j = L(theta) grad
//! theta, reservoir boundaries in theta, entropy-production diagnostics,
//! driven steady states and diffusive scale invariance.

mod diagnostics;
mod scaling;
mod solver;
mod steady;

pub use diagnostics::{entropy_diagnostics, EntropyReport};
pub use scaling::{scale_invariance_check, ScaleInvarianceReport};
pub use solver::{face_fluxes, solve, step};
pub use steady::{steady_state, SteadyMethod, SteadyState};

use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::field::{ControlField, ControlFieldHistory};
use crate::thermo::{Entropy, Pressure};

/// Onsager coefficient L(theta) = factor(theta) * I; positive factors keep
/// the entropy production sign definite.
#[derive(Debug, Clone, Copy)]
pub enum OnsagerLaw {
    /// L = mobility * I.
    Constant { mobility: f64 },
    /// L = mobility * theta_1 * I (used by the nonlinear steady-state test).
    Theta1Proportional { mobility: f64 },
}

impl OnsagerLaw {
    pub fn factor(&self, theta: &[f64]) -> f64 {
        match self {
            OnsagerLaw::Constant { mobility } => *mobility,
            OnsagerLaw::Theta1Proportional { mobility } => mobility * theta[0],
        }
    }
}

/// Boundary condition at one end of the domain.
#[derive(Debug, Clone)]
pub enum EndCondition {
    /// Zero flux through the wall.
    NoFlux,
    /// Reservoir clamping theta at the wall.
    Reservoir(Vec<f64>),
}

#[derive(Debug, Clone)]
pub enum Boundary {
    Ends { left: EndCondition, right: EndCondition },
    Periodic,
}

/// Initial data evaluated in the relative coordinate u = x / domain length,
/// which makes spatially stretched scenarios well defined.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// Uniform densities.
    Uniform { q: Vec<f64> },
    /// Uniform control value (converted through q = -pi').
    ThetaUniform { theta: Vec<f64> },
    /// q(u) = mean + amplitude * sin(2 pi k u), componentwise.
    SineMode { mean: Vec<f64>, amplitude: Vec<f64>, wavenumber: usize },
    /// Piecewise constant: left values for u < split, right values after.
    Step { left: Vec<f64>, right: Vec<f64>, split: f64 },
    /// theta linear from `from` to `to` across the domain.
    ThetaLinear { from: Vec<f64>, to: Vec<f64> },
}

/// Everything needed to integrate one scenario.
#[derive(Clone)]
pub struct HydroScenario {
    pub entropy: Arc<dyn Entropy>,
    pub pressure: Arc<dyn Pressure>,
    pub onsager: OnsagerLaw,
    pub cells: usize,
    pub domain_length: f64,
    pub boundary: Boundary,
    pub initial: InitialData,
    /// Space-time scaling exponent; 2 for this diffusive constitutive class.
    pub scaling_exponent: f64,
    pub t_final: f64,
    /// Checkpoint times (t = 0 and t_final are always captured).
    pub checkpoints: Vec<f64>,
}

impl HydroScenario {
    pub fn dim(&self) -> usize {
        self.entropy.dim()
    }

    pub fn spacing(&self) -> f64 {
        self.domain_length / self.cells as f64
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 2 {
            return Err(CoreError::Input("need at least 2 cells".into()));
        }
        if self.scaling_exponent <= 0.0 {
            return Err(CoreError::Input("scaling exponent must be positive".into()));
        }
        if self.t_final < 0.0 {
            return Err(CoreError::Input("t_final must be nonnegative".into()));
        }
        if self.domain_length <= 0.0 {
            return Err(CoreError::Input("domain length must be positive".into()));
        }
        Ok(())
    }

    /// Materialize the initial state on the grid.
    pub fn initial_state(&self) -> Result<HydroState> {
        let n = self.dim();
        let q_of_theta = |theta: &[f64]| -> Vec<f64> {
            self.pressure.grad(theta).iter().map(|g| -g).collect()
        };
        let mut q = Vec::with_capacity(self.cells);
        for i in 0..self.cells {
            let u = (i as f64 + 0.5) / self.cells as f64;
            let qi = match &self.initial {
                InitialData::Uniform { q } => q.clone(),
                InitialData::ThetaUniform { theta } => q_of_theta(theta),
                InitialData::SineMode { mean, amplitude, wavenumber } => mean
                    .iter()
                    .zip(amplitude)
                    .map(|(m, a)| {
                        m + a * (2.0 * std::f64::consts::PI * *wavenumber as f64 * u).sin()
                    })
                    .collect(),
                InitialData::Step { left, right, split } => {
                    if u < *split {
                        left.clone()
                    } else {
                        right.clone()
                    }
                }
                InitialData::ThetaLinear { from, to } => {
                    let theta: Vec<f64> =
                        from.iter().zip(to).map(|(a, b)| a + (b - a) * u).collect();
                    q_of_theta(&theta)
                }
            };
            if qi.len() != n {
                return Err(CoreError::Input("initial data dimension mismatch".into()));
            }
            if !self.entropy.domain().contains(&qi) {
                return Err(CoreError::Domain(format!(
                    "initial q = {qi:?} at cell {i} outside the entropy domain"
                )));
            }
            q.push(qi);
        }
        Ok(HydroState { q, t: 0.0 })
    }

    /// theta = s'(q) per cell.
    pub fn thetas(&self, state: &HydroState) -> Vec<Vec<f64>> {
        state.q.iter().map(|qi| self.entropy.grad(qi)).collect()
    }

    /// Control-field snapshot of a state.
    pub fn control_field(&self, state: &HydroState) -> ControlField {
        let xs = (0..self.cells).map(|i| self.cell_center(i)).collect();
        ControlField { xs, thetas: self.thetas(state), time: state.t }
    }
}

/// Conserved densities on the grid at one time.
#[derive(Debug, Clone)]
pub struct HydroState {
    pub q: Vec<Vec<f64>>,
    pub t: f64,
}

impl HydroState {
    /// Componentwise conserved totals sum_i q_i h.
    pub fn totals(&self, h: f64) -> Vec<f64> {
        let n = self.q[0].len();
        let mut tot = vec![0.0; n];
        for qi in &self.q {
            for c in 0..n {
                tot[c] += qi[c] * h;
            }
        }
        tot
    }
}

/// Per-step scalars recorded along a solve.
#[derive(Debug, Clone, Default)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub totals: Vec<f64>,
    pub entropy: f64,
    /// Most negative single-face entropy production this step.
    pub min_face_production: f64,
    /// Total production sum over faces.
    pub total_production: f64,
}

/// Checkpointed solution plus per-step diagnostics.
pub struct HydroTrajectory {
    pub snapshots: Vec<HydroState>,
    pub steps: Vec<StepRecord>,
}

impl HydroTrajectory {
    pub fn final_state(&self) -> &HydroState {
        self.snapshots.last().expect("trajectory has at least the initial state")
    }

    /// Control-field history of the checkpoints.
    pub fn control_history(&self, scenario: &HydroScenario) -> Result<ControlFieldHistory> {
        let snaps = self
            .snapshots
            .iter()
            .map(|s| {
                let mut f = scenario.control_field(s);
                f.time = s.t;
                f
            })
            .collect();
        ControlFieldHistory::new(snaps)
    }
}
