//! Tight-binding fermion chain with dispersion eps(p) = -2J cos p and two
//! conserved charges q = (energy density, particle density).
//!
//! The grand-canonical thermodynamics is exactly solvable:
//!
//!   pi(theta) = (1/2pi) Int ln(1 + exp(-(theta_1 eps(p) + theta_2))) dp
//!
//! with mode occupations f = 1/(1 + exp(theta_1 eps + theta_2)). Quadrature
//! of this formula (and of its derivatives) provides the infinite-volume
//! oracle against which the finite-volume mode sums are converged.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::num::adaptive_simpson;
use crate::thermo::{
    dual_entropy_hessian, entropy_from_pressure, ControlVariable, Domain, Entropy, Pressure,
    Representation, StateDensity,
};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct FreeFermionChainModel {
    pub hopping: f64,
}

impl FreeFermionChainModel {
    pub fn new(hopping: f64) -> Self {
        assert!(hopping > 0.0, "hopping amplitude must be positive");
        FreeFermionChainModel { hopping }
    }

    /// Band dispersion eps(p) = -2J cos p.
    pub fn dispersion(&self, p: f64) -> f64 {
        -2.0 * self.hopping * p.cos()
    }

    /// Mode occupation at Gibbs weight exp(-(theta_1 eps + theta_2)).
    pub fn occupation(&self, theta: &[f64], p: f64) -> f64 {
        let a = theta[0] * self.dispersion(p) + theta[1];
        1.0 / (1.0 + a.exp())
    }

    /// Infinite-volume reduced pressure by adaptive quadrature.
    pub fn pi_infinity(&self, theta: &ControlVariable, tol: f64) -> Result<f64> {
        self.check_theta(theta)?;
        let (t1, t2) = (theta.0[0], theta.0[1]);
        let j = self.hopping;
        let f = move |p: f64| {
            let a = t1 * (-2.0 * j * p.cos()) + t2;
            // ln(1 + e^{-a}) without overflow for large |a|
            if a > 0.0 {
                (-a).exp().ln_1p()
            } else {
                -a + a.exp().ln_1p()
            }
        };
        Ok(adaptive_simpson(&f, -PI, PI, tol * PI) / (2.0 * PI))
    }

    /// Infinite-volume densities (e, n) = -pi'(theta) by quadrature.
    pub fn densities_infinity(&self, theta: &ControlVariable, tol: f64) -> Result<StateDensity> {
        self.check_theta(theta)?;
        let th = theta.as_slice().to_vec();
        let me = *self;
        let e = adaptive_simpson(
            &|p: f64| me.dispersion(p) * me.occupation(&th, p),
            -PI,
            PI,
            tol * PI,
        ) / (2.0 * PI);
        let n = adaptive_simpson(&|p: f64| me.occupation(&th, p), -PI, PI, tol * PI) / (2.0 * PI);
        Ok(StateDensity(vec![e, n]))
    }

    /// Infinite-volume Hessian of pi by quadrature:
    /// pi''_{ab} = (1/2pi) Int u_a u_b f (1 - f) dp with u = (eps(p), 1).
    pub fn pi_hessian_quadrature(&self, theta: &ControlVariable, tol: f64) -> Result<DMatrix<f64>> {
        self.check_theta(theta)?;
        let th = theta.as_slice().to_vec();
        let me = *self;
        let weight = move |p: f64| {
            let f = me.occupation(&th, p);
            f * (1.0 - f)
        };
        let ee = adaptive_simpson(
            &|p: f64| {
                let u = me.dispersion(p);
                u * u * weight(p)
            },
            -PI,
            PI,
            tol * PI,
        ) / (2.0 * PI);
        let en = adaptive_simpson(
            &|p: f64| me.dispersion(p) * weight(p),
            -PI,
            PI,
            tol * PI,
        ) / (2.0 * PI);
        let nn = adaptive_simpson(&|p: f64| weight(p), -PI, PI, tol * PI) / (2.0 * PI);
        Ok(DMatrix::from_row_slice(2, 2, &[ee, en, en, nn]))
    }

    /// Momenta of the L-site ring, p_j = 2 pi j / L.
    pub fn momenta(&self, sites: usize) -> Vec<f64> {
        (0..sites).map(|j| 2.0 * PI * j as f64 / sites as f64).collect()
    }

    /// Single-particle mode energies eps(p_j).
    pub fn mode_energies(&self, sites: usize) -> Vec<f64> {
        self.momenta(sites).iter().map(|&p| self.dispersion(p)).collect()
    }

    /// L x L single-particle hopping matrix, h_{i,i±1} = -J, periodic.
    pub fn hopping_matrix(&self, sites: usize) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(sites, sites);
        for i in 0..sites {
            let j = (i + 1) % sites;
            h[(i, j)] = -self.hopping;
            h[(j, i)] = -self.hopping;
        }
        h
    }

    fn check_theta(&self, theta: &ControlVariable) -> Result<()> {
        if theta.dim() != 2 {
            return Err(CoreError::Input(format!(
                "free-fermion control variable has 2 components, got {}",
                theta.dim()
            )));
        }
        if theta.0[0] <= 0.0 {
            return Err(CoreError::Domain(format!(
                "free-fermion pressure needs theta_1 > 0, got {}",
                theta.0[0]
            )));
        }
        Ok(())
    }

    pub fn pressure(&self, quad_tol: f64) -> FreeFermionPressure {
        FreeFermionPressure { model: *self, tol: quad_tol }
    }

    pub fn entropy(&self, quad_tol: f64) -> FreeFermionEntropy {
        FreeFermionEntropy { pressure: self.pressure(quad_tol) }
    }
}

/// Quadrature-backed reduced pressure of the chain.
#[derive(Debug, Clone, Copy)]
pub struct FreeFermionPressure {
    model: FreeFermionChainModel,
    tol: f64,
}

impl Pressure for FreeFermionPressure {
    fn dim(&self) -> usize {
        2
    }

    fn control_space(&self) -> Domain {
        Domain {
            lower: vec![1e-300, f64::NEG_INFINITY],
            upper: vec![f64::INFINITY, f64::INFINITY],
        }
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        self.model
            .pi_infinity(&ControlVariable(theta.to_vec()), self.tol)
            .unwrap_or(f64::NAN)
    }

    fn grad(&self, theta: &[f64]) -> Vec<f64> {
        match self.model.densities_infinity(&ControlVariable(theta.to_vec()), self.tol) {
            Ok(q) => q.as_slice().iter().map(|v| -v).collect(),
            Err(_) => vec![f64::NAN; 2],
        }
    }

    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        self.model
            .pi_hessian_quadrature(&ControlVariable(theta.to_vec()), self.tol)
            .unwrap_or_else(|_| DMatrix::from_element(2, 2, f64::NAN))
    }

    fn representation(&self) -> Representation {
        Representation::ClosedForm
    }
}

/// Entropy of the chain recovered from the pressure by the dual Newton route
/// s(q) = inf_theta (pi(theta) + theta.q). Its gradient is the dual control
/// map theta*(q) and its Hessian comes from differencing that map, so none of
/// the derivative routes reuse pi'' directly.
#[derive(Debug, Clone, Copy)]
pub struct FreeFermionEntropy {
    pressure: FreeFermionPressure,
}

impl FreeFermionEntropy {
    fn start(&self) -> ControlVariable {
        ControlVariable(vec![1.0, 0.0])
    }
}

impl Entropy for FreeFermionEntropy {
    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> Domain {
        let j = self.pressure.model.hopping;
        let e_max = 2.0 * j / PI;
        Domain { lower: vec![-e_max, 0.0], upper: vec![e_max, 1.0] }
    }

    fn eval(&self, q: &[f64]) -> f64 {
        entropy_from_pressure(&self.pressure, &StateDensity(q.to_vec()), &self.start())
            .map(|(s, _)| s)
            .unwrap_or(f64::NAN)
    }

    fn grad(&self, q: &[f64]) -> Vec<f64> {
        entropy_from_pressure(&self.pressure, &StateDensity(q.to_vec()), &self.start())
            .map(|(_, th)| th.0)
            .unwrap_or_else(|_| vec![f64::NAN; 2])
    }

    fn hessian(&self, q: &[f64]) -> DMatrix<f64> {
        dual_entropy_hessian(&self.pressure, &StateDensity(q.to_vec()), &self.start())
            .unwrap_or_else(|_| DMatrix::from_element(2, 2, f64::NAN))
    }

    fn representation(&self) -> Representation {
        Representation::NumericConjugate
    }
}

/// Matrix element of the fermionic hop c_a^dagger c_b on an occupation
/// bitmask. Returns the new state and the Jordan-Wigner sign, or None when
/// the hop annihilates the state.
pub fn fermion_hop(state: u64, a: usize, b: usize) -> Option<(u64, f64)> {
    if a == b || state & (1 << b) == 0 || state & (1 << a) != 0 {
        return None;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let between_mask = if hi > lo + 1 { ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1) } else { 0 };
    let sign = if (state & between_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state ^ (1 << a) ^ (1 << b), sign))
}
