//! Detailed-balance jump generator on the probe's Bohr frequencies.
//!
//! Each coupling A decomposes into eigenoperators A(omega) connecting energy
//! eigenstates with gap omega; downward jumps carry the base rate and upward
//! jumps the Boltzmann-suppressed rate, which makes e^{-beta H}/Z stationary
//! by construction.

use num_complex::Complex64;

use crate::error::{CoreError, Result};

use super::{gibbs_state, CMat, ProbeSystem};

/// Bath spectral profile for the base (downward) rates.
#[derive(Debug, Clone, Copy)]
pub enum RateProfile {
    /// gamma(omega >= 0) = gamma0.
    Flat { gamma0: f64 },
}

impl RateProfile {
    fn base_rate(&self, _omega_abs: f64) -> f64 {
        match self {
            RateProfile::Flat { gamma0 } => *gamma0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct JumpOperator {
    /// Bohr frequency: positive for energy-lowering jumps.
    pub omega: f64,
    pub rate: f64,
    pub op: CMat,
}

/// The generator itself, with the vectorized Liouvillian cached.
pub struct ThermalGenerator {
    pub beta: f64,
    pub dim: usize,
    pub jumps: Vec<JumpOperator>,
    pub hamiltonian: CMat,
    pub gibbs: CMat,
    liouvillian: CMat,
}

impl ThermalGenerator {
    pub fn liouvillian(&self) -> &CMat {
        &self.liouvillian
    }

    /// Action on a density matrix (matrix form, for residual checks).
    pub fn apply(&self, rho: &CMat) -> CMat {
        let i = Complex64::new(0.0, 1.0);
        let mut out = (&self.hamiltonian * rho - rho * &self.hamiltonian) * (-i);
        for j in &self.jumps {
            let a = &j.op;
            let adag = a.adjoint();
            let ada = &adag * a;
            let g = Complex64::new(j.rate, 0.0);
            out += (a * rho * &adag - (&ada * rho + rho * &ada) * Complex64::new(0.5, 0.0)) * g;
        }
        out
    }

    /// Max-norm of the generator applied to its Gibbs state.
    pub fn stationarity_residual(&self) -> f64 {
        self.apply(&self.gibbs).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Column-stacking vectorization index: (row, col) -> col * dim + row.
fn vec_index(dim: usize, row: usize, col: usize) -> usize {
    col * dim + row
}

/// L such that L vec(rho) = vec(generator(rho)).
fn build_liouvillian(dim: usize, hamiltonian: &CMat, jumps: &[JumpOperator]) -> CMat {
    let d2 = dim * dim;
    let id = CMat::identity(dim, dim);
    let i = Complex64::new(0.0, 1.0);
    // vec(A X B) = (B^T kron A) vec(X)
    let kron = |b_t: &CMat, a: &CMat| -> CMat {
        let mut out = CMat::zeros(d2, d2);
        for bi in 0..dim {
            for bj in 0..dim {
                let w = b_t[(bi, bj)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ai in 0..dim {
                    for aj in 0..dim {
                        out[(vec_index(dim, ai, bi), vec_index(dim, aj, bj))] += w * a[(ai, aj)];
                    }
                }
            }
        }
        out
    };
    let mut l = kron(&id, hamiltonian) * (-i) + kron(&hamiltonian.transpose(), &id) * i;
    for j in jumps {
        let a = &j.op;
        let adag = a.adjoint();
        let ada = &adag * a;
        let g = Complex64::new(j.rate, 0.0);
        let half = Complex64::new(0.5, 0.0);
        // vec(A rho A^dag) = (conj(A) kron A) vec(rho)
        l += kron(&a.conjugate(), a) * g;
        l -= kron(&id, &ada) * (g * half);
        l -= kron(&ada.transpose(), &id) * (g * half);
    }
    l
}

/// Eigenoperator decomposition of the probe couplings with detailed-balance
/// rates at inverse temperature beta.
pub fn build_davies_generator(
    probe: &ProbeSystem,
    beta: f64,
    profile: RateProfile,
) -> Result<ThermalGenerator> {
    if beta <= 0.0 {
        return Err(CoreError::Input(format!("beta must be positive, got {beta}")));
    }
    let dim = probe.dim();
    let eig = probe.hamiltonian.clone().symmetric_eigen();
    let energies: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let scale = energies.iter().fold(1.0f64, |a, e| a.max(e.abs()));
    // nondegenerate spectrum keeps the decomposition unambiguous
    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    for w in sorted.windows(2) {
        if (w[1] - w[0]).abs() < 1e-9 * scale {
            return Err(CoreError::Unsupported(format!(
                "degenerate probe spectrum (gap {} at scale {scale}); \
                 the eigenoperator decomposition needs distinct levels",
                w[1] - w[0]
            )));
        }
    }
    let u = &eig.eigenvectors;
    let udag = u.adjoint();

    let omega_tol = 1e-9 * scale;
    let mut jumps: Vec<JumpOperator> = Vec::new();
    for a in &probe.couplings {
        let ta = &udag * a * u;
        // group matrix elements by Bohr frequency omega = E_n - E_m
        let mut groups: Vec<(f64, CMat)> = Vec::new();
        for m in 0..dim {
            for n in 0..dim {
                let el = ta[(m, n)];
                if el.norm() < 1e-14 {
                    continue;
                }
                let omega = energies[n] - energies[m];
                match groups.iter_mut().find(|(w, _)| (*w - omega).abs() <= omega_tol) {
                    Some((_, op)) => op[(m, n)] += el,
                    None => {
                        let mut op = CMat::zeros(dim, dim);
                        op[(m, n)] = el;
                        groups.push((omega, op));
                    }
                }
            }
        }
        for (omega, op_eig) in groups {
            let rate = if omega > omega_tol {
                profile.base_rate(omega)
            } else if omega < -omega_tol {
                profile.base_rate(-omega) * (-beta * (-omega)).exp()
            } else {
                profile.base_rate(0.0)
            };
            let op = u * op_eig * &udag;
            jumps.push(JumpOperator { omega, rate, op });
        }
    }
    jumps.sort_by(|a, b| a.omega.total_cmp(&b.omega));

    let gibbs = gibbs_state(&probe.hamiltonian, beta);
    let liouvillian = build_liouvillian(dim, &probe.hamiltonian, &jumps);
    let gen = ThermalGenerator {
        beta,
        dim,
        jumps,
        hamiltonian: probe.hamiltonian.clone(),
        gibbs,
        liouvillian,
    };
    let residual = gen.stationarity_residual();
    if residual > 1e-12 {
        return Err(CoreError::Convergence(format!(
            "generator does not annihilate the Gibbs state (residual {residual})"
        )));
    }
    Ok(gen)
}
