//! Dense backend: exact joint spectra of commuting conserved charges, Gibbs
//! weights with log-sum-exp guarding, and the finite-volume variational
//! stability of the Gibbs state.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::models::{fermion_hop, FreeFermionChainModel, SpinChainEdModel};
use crate::num::keyed_rng;
use crate::thermo::{ControlVariable, StateDensity};

use super::GibbsMoments;

/// Joint spectrum of a commuting family (H, extra charges): per eigenstate,
/// the energy and the value of each further charge.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    pub sites: usize,
    pub energies: Vec<f64>,
    /// `extras[c][k]` = value of charge c+1 in eigenstate k.
    pub extras: Vec<Vec<f64>>,
}

impl JointSpectrum {
    pub fn n_charges(&self) -> usize {
        1 + self.extras.len()
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Charge value of eigenstate k for charge index c (0 = energy).
    fn charge(&self, c: usize, k: usize) -> f64 {
        if c == 0 {
            self.energies[k]
        } else {
            self.extras[c - 1][k]
        }
    }

    /// Spectrum of the XXZ ring, diagonalized magnetization sector by
    /// magnetization sector (H and M commute exactly).
    pub fn of_spin_chain(model: &SpinChainEdModel) -> Self {
        let mut energies = Vec::with_capacity(model.hilbert_dim());
        let mut mags = Vec::with_capacity(model.hilbert_dim());
        for ups in 0..=model.sites {
            let states = model.sector_states(ups);
            if states.is_empty() {
                continue;
            }
            let m = ups as f64 - 0.5 * model.sites as f64;
            let block = model.sector_hamiltonian(&states);
            let eig = block.symmetric_eigen();
            for &e in eig.eigenvalues.iter() {
                energies.push(e);
                mags.push(m);
            }
        }
        JointSpectrum { sites: model.sites, energies, extras: vec![mags] }
    }

    /// Spectrum of the periodic fermion chain in Fock space (Jordan-Wigner
    /// signs included), sector by particle number.
    pub fn of_fermion_chain(model: &FreeFermionChainModel, sites: usize) -> Result<Self> {
        if sites > 12 {
            return Err(CoreError::Capacity(format!(
                "dense fermion backend capped at 12 sites, got {sites}"
            )));
        }
        let dim = 1usize << sites;
        let mut energies = Vec::with_capacity(dim);
        let mut numbers = Vec::with_capacity(dim);
        for filled in 0..=sites {
            let states: Vec<u64> =
                (0..dim as u64).filter(|s| s.count_ones() as usize == filled).collect();
            if states.is_empty() {
                continue;
            }
            let index: std::collections::BTreeMap<u64, usize> =
                states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
            let m = states.len();
            let mut block = DMatrix::<f64>::zeros(m, m);
            for (col, &state) in states.iter().enumerate() {
                for i in 0..sites {
                    let j = (i + 1) % sites;
                    // -J (c_i^dag c_j + c_j^dag c_i)
                    for (a, b) in [(i, j), (j, i)] {
                        if let Some((new_state, sign)) = fermion_hop(state, a, b) {
                            block[(index[&new_state], col)] += -model.hopping * sign;
                        }
                    }
                }
            }
            let eig = block.symmetric_eigen();
            for &e in eig.eigenvalues.iter() {
                energies.push(e);
                numbers.push(filled as f64);
            }
        }
        Ok(JointSpectrum { sites, energies, extras: vec![numbers] })
    }

    /// Spectrum of L independent two-level sites with splitting eps: the
    /// microscopic paramagnet (energy is the only charge).
    pub fn of_paramagnet(epsilon: f64, sites: usize) -> Result<Self> {
        if sites > 20 {
            return Err(CoreError::Capacity(format!(
                "paramagnet spectrum enumeration capped at 20 sites, got {sites}"
            )));
        }
        let dim = 1usize << sites;
        let energies = (0..dim as u64)
            .map(|s| epsilon * (2.0 * s.count_ones() as f64 - sites as f64))
            .collect();
        Ok(JointSpectrum { sites, energies, extras: vec![] })
    }
}

/// Gibbs ensemble over a joint spectrum.
pub struct DenseGibbs {
    pub theta: ControlVariable,
    pub sites: usize,
    spectrum: JointSpectrum,
    /// Normalized Boltzmann weights.
    weights: Vec<f64>,
    ln_z: f64,
}

impl DenseGibbs {
    pub fn new(spectrum: JointSpectrum, theta: &ControlVariable) -> Result<Self> {
        if theta.dim() != spectrum.n_charges() {
            return Err(CoreError::Input(format!(
                "theta has {} components but the spectrum carries {} charges",
                theta.dim(),
                spectrum.n_charges()
            )));
        }
        if theta.0[0] <= 0.0 {
            return Err(CoreError::Domain(format!(
                "Gibbs state needs theta_1 > 0, got {}",
                theta.0[0]
            )));
        }
        let dim = spectrum.dim();
        let mut exponents = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut a = 0.0;
            for c in 0..spectrum.n_charges() {
                a += theta.0[c] * spectrum.charge(c, k);
            }
            exponents.push(-a);
        }
        let m = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z_shift: f64 = exponents.iter().map(|&e| (e - m).exp()).sum();
        let ln_z = m + z_shift.ln();
        let weights = exponents.iter().map(|&e| (e - ln_z).exp()).collect();
        Ok(DenseGibbs { theta: theta.clone(), sites: spectrum.sites, spectrum, weights, ln_z })
    }

    pub fn ln_z(&self) -> f64 {
        self.ln_z
    }

    pub fn pi_l(&self) -> f64 {
        self.ln_z / self.sites as f64
    }

    pub fn moments(&self) -> GibbsMoments {
        let nc = self.spectrum.n_charges();
        let l = self.sites as f64;
        let mut means = vec![0.0; nc];
        for k in 0..self.spectrum.dim() {
            for (c, mean) in means.iter_mut().enumerate() {
                *mean += self.weights[k] * self.spectrum.charge(c, k);
            }
        }
        let mut cov = DMatrix::zeros(nc, nc);
        for k in 0..self.spectrum.dim() {
            for a in 0..nc {
                let da = self.spectrum.charge(a, k) - means[a];
                for b in a..nc {
                    let db = self.spectrum.charge(b, k) - means[b];
                    cov[(a, b)] += self.weights[k] * da * db;
                }
            }
        }
        for a in 0..nc {
            for b in 0..a {
                cov[(a, b)] = cov[(b, a)];
            }
        }
        GibbsMoments {
            q_hat: StateDensity(means.iter().map(|m| m / l).collect()),
            covariance: cov / l,
        }
    }

    pub fn entropy_density(&self) -> f64 {
        let s: f64 = self
            .weights
            .iter()
            .map(|&w| if w > 0.0 { -w * w.ln() } else { 0.0 })
            .sum();
        s / self.sites as f64
    }
}

/// Dense Gibbs density matrix exp(-theta.Q)/Z for explicit matrix charges
/// (brute-force oracle path and variational perturbations).
pub fn dense_gibbs_density_matrix(
    charges: &[DMatrix<f64>],
    theta: &ControlVariable,
) -> Result<DMatrix<f64>> {
    if charges.is_empty() || charges.len() != theta.dim() {
        return Err(CoreError::Input("charge/theta count mismatch".into()));
    }
    let n = charges[0].nrows();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (c, q) in charges.iter().enumerate() {
        a += q * theta.0[c];
    }
    let eig = a.symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let boltz: Vec<f64> = eig.eigenvalues.iter().map(|&e| (-(e - min)).exp()).collect();
    let z: f64 = boltz.iter().sum();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(n, boltz.iter().map(|b| b / z)));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// One entry of the variational check: the stability functional at mixing
/// weight lambda toward the perturbing state.
#[derive(Debug, Clone)]
pub struct GtsEntry {
    pub lambda: f64,
    pub functional: f64,
    /// pi_L - F(rho'): nonnegative, zero only at lambda = 0.
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct GtsReport {
    pub pi_l: f64,
    pub entries: Vec<GtsEntry>,
}

/// Finite-volume variational stability: the Gibbs state maximizes
/// F(rho) = s_L(rho) - theta.q_hat(rho), attaining pi_L. Mixtures toward any
/// other state score strictly below.
pub fn gts_variational_check(
    model: &SpinChainEdModel,
    theta: &ControlVariable,
    lambdas: &[f64],
    perturbation: Option<&DMatrix<f64>>,
    seed: u64,
) -> Result<GtsReport> {
    let h = model.dense_hamiltonian();
    let mz = model.dense_magnetization();
    let charges = [h.clone(), mz.clone()];
    let rho_gibbs = dense_gibbs_density_matrix(&charges, theta)?;
    let dim = rho_gibbs.nrows();

    // Default perturbing state: a seeded random pure state.
    let sigma = match perturbation {
        Some(s) => s.clone(),
        None => {
            let mut rng = keyed_rng(seed, 0, 0);
            let mut v = DVector::from_iterator(
                dim,
                (0..dim).map(|_| crate::num::normal_pair(&mut rng).0),
            );
            v /= v.norm();
            &v * v.transpose()
        }
    };

    let l = model.sites as f64;
    let functional = |rho: &DMatrix<f64>| -> f64 {
        let eig = rho.clone().symmetric_eigen();
        let s: f64 = eig
            .eigenvalues
            .iter()
            .map(|&p| if p > 1e-300 { -p * p.ln() } else { 0.0 })
            .sum();
        let eh = (rho * &h).trace();
        let em = (rho * &mz).trace();
        (s - theta.0[0] * eh - theta.0[1] * em) / l
    };

    let pi_l = functional(&rho_gibbs);
    let mut entries = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(CoreError::Input(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let rho = &rho_gibbs * (1.0 - lambda) + &sigma * lambda;
        let f = functional(&rho);
        entries.push(GtsEntry { lambda, functional: f, gap: pi_l - f });
    }
    Ok(GtsReport { pi_l, entries })
}
