//! Local zeroth law: a finite probe weakly coupled to the medium at a point
//! relaxes to the Gibbs state at the local inverse temperature
//! beta = theta_1(x, t). The bath enters only through detailed-balance jump
//! rates gamma(-omega) = e^{-beta omega} gamma(omega) on the probe's Bohr
//! frequencies.

mod davies;
mod evolve;

pub use davies::{build_davies_generator, JumpOperator, RateProfile, ThermalGenerator};
pub use evolve::{
    evolve, fit_beta_from_state, local_probe_scenario, thermalization_check, ProbeSceneReport,
    ThermalizationReport,
};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CoreError, Result};

pub type CMat = DMatrix<Complex64>;

pub const PROBE_MAX_DIM: usize = 8;

/// Finite probe: Hamiltonian plus Hermitian coupling operators.
pub struct ProbeSystem {
    pub hamiltonian: CMat,
    pub couplings: Vec<CMat>,
}

fn hermiticity_defect(m: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

impl ProbeSystem {
    pub fn new(hamiltonian: CMat, couplings: Vec<CMat>) -> Result<Self> {
        let dim = hamiltonian.nrows();
        if dim != hamiltonian.ncols() || dim == 0 {
            return Err(CoreError::Input("probe Hamiltonian must be square".into()));
        }
        if dim > PROBE_MAX_DIM {
            return Err(CoreError::Capacity(format!(
                "probe dimension capped at {PROBE_MAX_DIM}, got {dim}"
            )));
        }
        let scale = hamiltonian.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        if hermiticity_defect(&hamiltonian) > 1e-10 * scale {
            return Err(CoreError::Input("probe Hamiltonian is not Hermitian".into()));
        }
        if couplings.is_empty() {
            return Err(CoreError::Input("probe needs at least one coupling operator".into()));
        }
        for (k, a) in couplings.iter().enumerate() {
            if a.nrows() != dim || a.ncols() != dim {
                return Err(CoreError::Input(format!("coupling {k} has wrong dimension")));
            }
            let s = a.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            if hermiticity_defect(a) > 1e-10 * s {
                return Err(CoreError::Input(format!("coupling {k} is not Hermitian")));
            }
        }
        Ok(ProbeSystem { hamiltonian, couplings })
    }

    /// Two-level probe H = diag(0, omega0) coupled through sigma_x.
    pub fn qubit(omega0: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let h = CMat::from_row_slice(2, 2, &[z, z, z, Complex64::new(omega0, 0.0)]);
        let sx = CMat::from_row_slice(2, 2, &[z, one, one, z]);
        ProbeSystem { hamiltonian: h, couplings: vec![sx] }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.nrows()
    }
}

/// Gibbs state e^{-beta H}/Z of a Hermitian matrix.
pub fn gibbs_state(h: &CMat, beta: f64) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let e0 = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let boltz: Vec<f64> = eig.eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = boltz.iter().sum();
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        h.nrows(),
        boltz.iter().map(|&b| Complex64::new(b / z, 0.0)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Trace distance (1/2) ||rho - sigma||_1 of Hermitian density matrices.
pub fn trace_distance(a: &CMat, b: &CMat) -> f64 {
    let diff = a - b;
    let eig = diff.symmetric_eigen();
    0.5 * eig.eigenvalues.iter().map(|e| e.abs()).sum::<f64>()
}
