//! Finite-volume quantum Gibbs statistics: reduced pressure and its
//! thermodynamic limit, moment/Hessian duality, the variational stability of
//! the Gibbs state, effective dynamics with KMS residuals, thermodynamic
//! completeness and the local-restriction condition.

pub mod dense;
pub mod fermion;
pub mod kms;
pub mod limits;

use nalgebra::DMatrix;

use crate::error::Result;
use crate::models::{FreeFermionChainModel, SpinChainEdModel};
use crate::thermo::{ControlVariable, StateDensity};

pub use dense::{dense_gibbs_density_matrix, gts_variational_check, DenseGibbs, GtsReport, JointSpectrum};
pub use fermion::{FermionGibbs, LocalGibbsProfile, ProfileGibbs};
pub use kms::{
    build_effective_hamiltonian, effective_single_particle, kms_check, KmsCheckReport, KmsEntry,
};
pub use limits::{
    completeness_check, local_restriction_check, pi_convergence_chain, pi_convergence_fermion,
    CompletenessReport, PiConvergence, RestrictionReport,
};

/// Global densities q_hat = tr(rho Q)/L and covariance Cov(Q)/L of a Gibbs state.
#[derive(Debug, Clone)]
pub struct GibbsMoments {
    pub q_hat: StateDensity,
    pub covariance: DMatrix<f64>,
}

/// Finite-volume Gibbs ensemble at control value theta, on either backend.
pub enum FiniteGibbsState {
    Dense(DenseGibbs),
    Fermion(FermionGibbs),
}

impl FiniteGibbsState {
    pub fn fermion(model: &FreeFermionChainModel, theta: &ControlVariable, sites: usize) -> Result<Self> {
        Ok(FiniteGibbsState::Fermion(FermionGibbs::new(model, theta, sites)?))
    }

    pub fn spin_chain(model: &SpinChainEdModel, theta: &ControlVariable) -> Result<Self> {
        let spectrum = JointSpectrum::of_spin_chain(model);
        Ok(FiniteGibbsState::Dense(DenseGibbs::new(spectrum, theta)?))
    }

    /// Dense realization of the fermion chain (Jordan-Wigner Fock space),
    /// used to cross-check the two backends.
    pub fn fermion_dense(model: &FreeFermionChainModel, theta: &ControlVariable, sites: usize) -> Result<Self> {
        let spectrum = JointSpectrum::of_fermion_chain(model, sites)?;
        Ok(FiniteGibbsState::Dense(DenseGibbs::new(spectrum, theta)?))
    }

    pub fn theta(&self) -> &ControlVariable {
        match self {
            FiniteGibbsState::Dense(d) => &d.theta,
            FiniteGibbsState::Fermion(f) => &f.theta,
        }
    }

    pub fn sites(&self) -> usize {
        match self {
            FiniteGibbsState::Dense(d) => d.sites,
            FiniteGibbsState::Fermion(f) => f.sites,
        }
    }

    /// Reduced pressure pi_L = ln Tr exp(-theta.Q) / L.
    pub fn pi_l(&self) -> f64 {
        match self {
            FiniteGibbsState::Dense(d) => d.pi_l(),
            FiniteGibbsState::Fermion(f) => f.pi_l(),
        }
    }

    /// Global density and covariance moments.
    pub fn moments(&self) -> GibbsMoments {
        match self {
            FiniteGibbsState::Dense(d) => d.moments(),
            FiniteGibbsState::Fermion(f) => f.moments(),
        }
    }

    /// Von Neumann entropy density s_L = -Tr(rho ln rho)/L.
    pub fn entropy_density(&self) -> f64 {
        match self {
            FiniteGibbsState::Dense(d) => d.entropy_density(),
            FiniteGibbsState::Fermion(f) => f.entropy_density(),
        }
    }

    /// Residual of the Gibbs identity s_L - pi_L - theta.q_hat.
    pub fn gibbs_identity_residual(&self) -> f64 {
        let s = self.entropy_density();
        let pi = self.pi_l();
        let q = self.moments().q_hat;
        let dot: f64 = self.theta().as_slice().iter().zip(q.as_slice()).map(|(t, q)| t * q).sum();
        (s - pi - dot).abs()
    }
}

/// The bundle map of a control field: every space-time point carries the
/// equilibrium ensemble at its local control value. This is the single
/// object the pipeline attaches to each check point.
pub fn gibbs_at_point(
    model: &FreeFermionChainModel,
    history: &crate::field::ControlFieldHistory,
    x: f64,
    t: f64,
    sites: usize,
) -> Result<FiniteGibbsState> {
    let theta = history.theta_at(x, t)?;
    FiniteGibbsState::fermion(model, &ControlVariable(theta), sites)
}

/// pi_L as a function of theta (used for finite-difference duality checks).
pub fn pi_l_fermion(model: &FreeFermionChainModel, theta: &[f64], sites: usize) -> Result<f64> {
    Ok(FermionGibbs::new(model, &ControlVariable(theta.to_vec()), sites)?.pi_l())
}

pub fn pi_l_spin_chain(model: &SpinChainEdModel, theta: &[f64]) -> Result<f64> {
    let spectrum = JointSpectrum::of_spin_chain(model);
    Ok(DenseGibbs::new(spectrum, &ControlVariable(theta.to_vec()))?.pi_l())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ControlField, ControlFieldHistory};

    #[test]
    fn bundle_map_attaches_local_gibbs_states() {
        let model = FreeFermionChainModel::new(1.0);
        let mut a = ControlField::from_profile(&|x| vec![0.5 + x, 0.0], 32);
        a.time = 0.0;
        let mut b = a.clone();
        b.time = 1.0;
        let history = ControlFieldHistory::new(vec![a, b]).unwrap();

        let state = gibbs_at_point(&model, &history, 0.25, 0.5, 128).unwrap();
        assert!((state.theta().0[0] - 0.75).abs() < 1e-12);
        // same point, same ensemble as the direct construction
        let direct =
            FiniteGibbsState::fermion(&model, &ControlVariable(vec![0.75, 0.0]), 128).unwrap();
        assert!((state.pi_l() - direct.pi_l()).abs() < 1e-15);
        // outside the covered horizon the map is undefined
        assert!(gibbs_at_point(&model, &history, 0.25, 2.0, 128).is_err());
    }
}
