//! Free-fermion backend: grand-canonical mode occupations for homogeneous
//! states (L up to thousands) and the correlation matrix
//! C = (I + e^A)^(-1) for locally-Gibbs states with a spatial theta profile.

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::field::ControlField;
use crate::models::FreeFermionChainModel;
use crate::num::NeumaierSum;
use crate::thermo::{ControlVariable, StateDensity};

use super::GibbsMoments;

/// Homogeneous Gibbs state of the chain in mode representation.
pub struct FermionGibbs {
    pub theta: ControlVariable,
    pub sites: usize,
    /// Mode exponents a_j = theta_1 eps(p_j) + theta_2.
    mode_a: Vec<f64>,
    mode_eps: Vec<f64>,
}

/// ln(1 + e^{-a}) without overflow.
fn ln1pe(a: f64) -> f64 {
    if a > 0.0 {
        (-a).exp().ln_1p()
    } else {
        -a + a.exp().ln_1p()
    }
}

/// Fermi factor 1/(1 + e^a).
fn fermi(a: f64) -> f64 {
    if a >= 0.0 {
        let e = (-a).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + a.exp())
    }
}

impl FermionGibbs {
    pub fn new(
        model: &FreeFermionChainModel,
        theta: &ControlVariable,
        sites: usize,
    ) -> Result<Self> {
        if theta.dim() != 2 {
            return Err(CoreError::Input("free-fermion theta has 2 components".into()));
        }
        if theta.0[0] <= 0.0 {
            return Err(CoreError::Domain(format!(
                "Gibbs state needs theta_1 > 0, got {}",
                theta.0[0]
            )));
        }
        if sites == 0 {
            return Err(CoreError::Input("chain needs at least one site".into()));
        }
        let mode_eps = model.mode_energies(sites);
        let mode_a = mode_eps.iter().map(|&e| theta.0[0] * e + theta.0[1]).collect();
        Ok(FermionGibbs { theta: theta.clone(), sites, mode_a, mode_eps })
    }

    pub fn occupations(&self) -> Vec<f64> {
        self.mode_a.iter().map(|&a| fermi(a)).collect()
    }

    pub fn pi_l(&self) -> f64 {
        let sum: NeumaierSum = self.mode_a.iter().map(|&a| ln1pe(a)).collect();
        sum.value() / self.sites as f64
    }

    pub fn moments(&self) -> GibbsMoments {
        let l = self.sites as f64;
        let mut e = NeumaierSum::new();
        let mut n = NeumaierSum::new();
        let mut cee = NeumaierSum::new();
        let mut cen = NeumaierSum::new();
        let mut cnn = NeumaierSum::new();
        for (&a, &eps) in self.mode_a.iter().zip(&self.mode_eps) {
            let f = fermi(a);
            let w = f * (1.0 - f);
            e.add(eps * f);
            n.add(f);
            cee.add(eps * eps * w);
            cen.add(eps * w);
            cnn.add(w);
        }
        GibbsMoments {
            q_hat: StateDensity(vec![e.value() / l, n.value() / l]),
            covariance: DMatrix::from_row_slice(
                2,
                2,
                &[cee.value() / l, cen.value() / l, cen.value() / l, cnn.value() / l],
            ),
        }
    }

    pub fn entropy_density(&self) -> f64 {
        let mut s = NeumaierSum::new();
        for &a in &self.mode_a {
            let f = fermi(a);
            let g = 1.0 - f;
            let mut term = 0.0;
            if f > 0.0 {
                term -= f * f.ln();
            }
            if g > 0.0 {
                term -= g * g.ln();
            }
            s.add(term);
        }
        s.value() / self.sites as f64
    }
}

/// Spatial theta profile on the ring: theta sampled at site fractions
/// x = i/L. Bond couplings take the arithmetic mean of the endpoint theta_1
/// so the quadratic form stays symmetric and the homogeneous case is exact.
#[derive(Debug, Clone)]
pub struct LocalGibbsProfile {
    pub sites: usize,
    thetas: Vec<[f64; 2]>,
}

impl LocalGibbsProfile {
    pub fn from_fn(sites: usize, profile: &dyn Fn(f64) -> [f64; 2]) -> Result<Self> {
        if sites < 4 {
            return Err(CoreError::Input("profile needs at least 4 sites".into()));
        }
        let thetas: Vec<[f64; 2]> =
            (0..sites).map(|i| profile(i as f64 / sites as f64)).collect();
        let p = LocalGibbsProfile { sites, thetas };
        p.validate()?;
        Ok(p)
    }

    /// Sample a control-field snapshot at site fractions x = i/L.
    pub fn from_control_field(sites: usize, field: &ControlField) -> Result<Self> {
        if field.dim() != 2 {
            return Err(CoreError::Input(
                "profile states need a 2-component control field (energy, number)".into(),
            ));
        }
        Self::from_fn(sites, &|x| {
            let th = field.theta_at(x);
            [th[0], th[1]]
        })
    }

    fn validate(&self) -> Result<()> {
        for (i, th) in self.thetas.iter().enumerate() {
            if th[0] <= 0.0 {
                return Err(CoreError::Domain(format!(
                    "profile theta_1 must stay positive; site {i} has {}",
                    th[0]
                )));
            }
        }
        // Smoothness on the open-chain interior (the ring seam of a driven
        // profile is a genuine jump and is exempt).
        let mut max_dd = 0.0f64;
        for i in 1..self.sites - 1 {
            let dd = (self.thetas[i + 1][0] - 2.0 * self.thetas[i][0] + self.thetas[i - 1][0])
                .abs()
                .max(
                    (self.thetas[i + 1][1] - 2.0 * self.thetas[i][1] + self.thetas[i - 1][1])
                        .abs(),
                );
            max_dd = max_dd.max(dd);
        }
        if max_dd > 0.1 {
            return Err(CoreError::Precondition(format!(
                "profile is not smooth: max interior second difference {max_dd}"
            )));
        }
        Ok(())
    }

    pub fn theta_at_site(&self, i: usize) -> [f64; 2] {
        self.thetas[i % self.sites]
    }

    /// Largest interior site-to-site theta_1 increment (resolution measure).
    pub fn max_gradient_step(&self) -> f64 {
        (0..self.sites - 1)
            .map(|i| (self.thetas[i + 1][0] - self.thetas[i][0]).abs())
            .fold(0.0, f64::max)
    }
}

/// Locally-Gibbs fermion state for a spatial profile, held as the
/// correlation matrix C_ij = <c_i^dag c_j>.
pub struct ProfileGibbs {
    pub sites: usize,
    hopping: f64,
    corr: DMatrix<f64>,
}

impl ProfileGibbs {
    pub fn new(model: &FreeFermionChainModel, profile: &LocalGibbsProfile) -> Result<Self> {
        let l = profile.sites;
        let mut a = DMatrix::<f64>::zeros(l, l);
        for i in 0..l {
            a[(i, i)] = profile.theta_at_site(i)[1];
            let j = (i + 1) % l;
            let mean_t1 = 0.5 * (profile.theta_at_site(i)[0] + profile.theta_at_site(j)[0]);
            let coupling = -model.hopping * mean_t1;
            a[(i, j)] = coupling;
            a[(j, i)] = coupling;
        }
        let eig = a.symmetric_eigen();
        let occ: Vec<f64> = eig.eigenvalues.iter().map(|&d| fermi(d)).collect();
        // C = U f(D) U^T for the weight exp(-sum A_ij c_i^dag c_j)
        let u = &eig.eigenvectors;
        let f = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(occ));
        let corr = u * f * u.transpose();
        Ok(ProfileGibbs { sites: l, hopping: model.hopping, corr })
    }

    /// On-site density <n_i>.
    pub fn density(&self, i: usize) -> f64 {
        self.corr[(i % self.sites, i % self.sites)]
    }

    /// Bond kinetic energy <-J (c_i^dag c_{i+1} + h.c.)>.
    pub fn bond_kinetic(&self, i: usize) -> f64 {
        let a = i % self.sites;
        let b = (i + 1) % self.sites;
        -self.hopping * (self.corr[(a, b)] + self.corr[(b, a)])
    }

    /// Window averages of (density, bond kinetic energy) over `window` sites
    /// centered at site `center`.
    pub fn window_observables(&self, center: usize, window: usize) -> (f64, f64) {
        let w2 = window / 2;
        let mut dens = NeumaierSum::new();
        let mut kin = NeumaierSum::new();
        for k in 0..window {
            let site = (center + self.sites + k) - w2;
            dens.add(self.density(site % self.sites));
            kin.add(self.bond_kinetic(site % self.sites));
        }
        (dens.value() / window as f64, kin.value() / window as f64)
    }
}
