//! Thermodynamic-limit checks: convergence of the finite-volume reduced
//! pressure to the quadrature value, thermodynamic completeness of the
//! conserved charges, and the local-restriction condition for profile states.

use crate::error::{CoreError, Result};
use crate::models::FreeFermionChainModel;
use crate::num::bisect_root;
use crate::thermo::ControlVariable;

use super::fermion::{FermionGibbs, LocalGibbsProfile, ProfileGibbs};

/// Deviations below this floor sit at the accuracy of the quadrature oracle
/// itself (its stated absolute tolerance); ordering beneath it is noise.
pub const PI_REFERENCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PiConvergence {
    pub sizes: Vec<usize>,
    pub pi_values: Vec<f64>,
    /// Quadrature reference where one exists (fermion path).
    pub reference: Option<f64>,
    pub deviations: Option<Vec<f64>>,
    pub extrapolated: f64,
    /// Strict decrease of |pi_L - reference| holds until both neighbors sit
    /// at or below the oracle floor.
    pub monotone_above_floor: bool,
    /// Cauchy behavior of the raw sequence: |increments| non-increasing.
    pub increments_decreasing: bool,
}

fn richardson_extrapolate(sizes: &[usize], values: &[f64]) -> f64 {
    let n = values.len();
    if n < 3 {
        return *values.last().unwrap();
    }
    let d1 = values[n - 2] - values[n - 3];
    let d2 = values[n - 1] - values[n - 2];
    let r = sizes[n - 1] as f64 / sizes[n - 2] as f64;
    if d2.abs() < 1e-15 || d1.abs() <= d2.abs() || r <= 1.0 {
        return values[n - 1];
    }
    // power fitted from the last three points: |d1/d2| = r^p
    let p = (d1 / d2).abs().ln() / r.ln();
    let factor = r.powf(p) - 1.0;
    if !factor.is_finite() || factor <= 0.0 {
        return values[n - 1];
    }
    values[n - 1] + d2 / factor
}

fn analyze(sizes: Vec<usize>, pi_values: Vec<f64>, reference: Option<f64>) -> PiConvergence {
    let deviations =
        reference.map(|r| pi_values.iter().map(|&p| (p - r).abs()).collect::<Vec<f64>>());
    let monotone_above_floor = match &deviations {
        Some(devs) => devs
            .windows(2)
            .all(|w| w[1] < w[0] || w[1] <= PI_REFERENCE_FLOOR),
        None => true,
    };
    let increments: Vec<f64> =
        pi_values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let increments_decreasing = increments
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14);
    let extrapolated = richardson_extrapolate(&sizes, &pi_values);
    PiConvergence {
        sizes,
        pi_values,
        reference,
        deviations,
        extrapolated,
        monotone_above_floor,
        increments_decreasing,
    }
}

/// pi_L over a size list against the quadrature limit (fermion path).
pub fn pi_convergence_fermion(
    model: &FreeFermionChainModel,
    theta: &ControlVariable,
    sizes: &[usize],
    quad_tol: f64,
) -> Result<PiConvergence> {
    if sizes.is_empty() || !sizes.windows(2).all(|w| w[1] > w[0]) {
        return Err(CoreError::Input("size list must be ascending and nonempty".into()));
    }
    let reference = model.pi_infinity(theta, quad_tol)?;
    let mut pi_values = Vec::with_capacity(sizes.len());
    for &l in sizes {
        pi_values.push(FermionGibbs::new(model, theta, l)?.pi_l());
    }
    Ok(analyze(sizes.to_vec(), pi_values, Some(reference)))
}

/// pi_L over a size list from an arbitrary builder (ED path, no closed-form
/// reference; Cauchy behavior of the increments is the testable property).
pub fn pi_convergence_chain(
    pi_of_size: &dyn Fn(usize) -> Result<f64>,
    sizes: &[usize],
) -> Result<PiConvergence> {
    if sizes.is_empty() || !sizes.windows(2).all(|w| w[1] > w[0]) {
        return Err(CoreError::Input("size list must be ascending and nonempty".into()));
    }
    let mut pi_values = Vec::with_capacity(sizes.len());
    for &l in sizes {
        pi_values.push(pi_of_size(l)?);
    }
    Ok(analyze(sizes.to_vec(), pi_values, None))
}

/// Pair of control values agreeing in one density component and separated by
/// another: a witness that the smaller charge set does not separate states.
#[derive(Debug, Clone)]
pub struct SeparationWitness {
    pub theta_a: Vec<f64>,
    pub theta_b: Vec<f64>,
    pub shared_component: usize,
    pub shared_value: f64,
    pub differing_component: usize,
    pub differing_values: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct CompletenessReport {
    /// Minimum eigenvalue of pi'' over the scanned pure-phase grid
    /// (positivity = injectivity of theta -> q).
    pub min_hessian_eigenvalue: f64,
    /// theta pair sharing the particle density but not the energy density.
    pub density_witness: Option<SeparationWitness>,
    /// theta pair sharing the energy density but not the particle density.
    pub energy_witness: Option<SeparationWitness>,
    pub conclusive: bool,
}

/// Thermodynamic completeness of (energy, number) for the fermion chain:
/// (i) pi'' positive definite over the grid, so theta -> q is injective and
/// the charges separate states; (ii) explicit witnesses that each proper
/// subset fails to separate.
pub fn completeness_check(
    model: &FreeFermionChainModel,
    theta1_range: (f64, f64),
    theta2_range: (f64, f64),
    grid_points: usize,
    quad_tol: f64,
) -> Result<CompletenessReport> {
    let n = grid_points.max(3);
    let mut min_eig = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let t1 = theta1_range.0
                + (theta1_range.1 - theta1_range.0) * i as f64 / (n - 1) as f64;
            let t2 = theta2_range.0
                + (theta2_range.1 - theta2_range.0) * j as f64 / (n - 1) as f64;
            let h = model.pi_hessian_quadrature(&ControlVariable(vec![t1, t2]), quad_tol)?;
            // eigenvalues of the symmetric 2x2 block
            let tr = h[(0, 0)] + h[(1, 1)];
            let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
            let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
            min_eig = min_eig.min(0.5 * tr - disc);
        }
    }

    // Witness: particle-hole symmetry pins n = 1/2 along theta_2 = 0, so two
    // different temperatures share n while the energies differ.
    let ta = ControlVariable(vec![1.0, 0.0]);
    let tb = ControlVariable(vec![2.0, 0.0]);
    let qa = model.densities_infinity(&ta, quad_tol)?;
    let qb = model.densities_infinity(&tb, quad_tol)?;
    let density_witness = if (qa.0[1] - qb.0[1]).abs() < 1e-8 && (qa.0[0] - qb.0[0]).abs() > 1e-6 {
        Some(SeparationWitness {
            theta_a: ta.0.clone(),
            theta_b: tb.0.clone(),
            shared_component: 1,
            shared_value: qa.0[1],
            differing_component: 0,
            differing_values: (qa.0[0], qb.0[0]),
        })
    } else {
        None
    };

    // Witness: root-find theta_1 along theta_2 = 0.5 with the same energy
    // density as theta = (1, 0); the particle densities then differ.
    let e_target = qa.0[0];
    let t2 = 0.5;
    let g = |t1: f64| {
        model
            .densities_infinity(&ControlVariable(vec![t1, t2]), quad_tol)
            .map(|q| q.0[0] - e_target)
            .unwrap_or(f64::NAN)
    };
    let mut bracket = None;
    let scan: Vec<f64> = (0..40).map(|k| 0.2 + 0.2 * k as f64).collect();
    for w in scan.windows(2) {
        let (ga, gb) = (g(w[0]), g(w[1]));
        if ga.is_finite() && gb.is_finite() && ga.signum() != gb.signum() {
            bracket = Some((w[0], w[1]));
            break;
        }
    }
    let energy_witness = match bracket {
        Some((lo, hi)) => {
            let t1_star = bisect_root(&g, lo, hi, 1e-12)?;
            let q_star =
                model.densities_infinity(&ControlVariable(vec![t1_star, t2]), quad_tol)?;
            if (q_star.0[1] - qa.0[1]).abs() > 1e-6 {
                Some(SeparationWitness {
                    theta_a: ta.0,
                    theta_b: vec![t1_star, t2],
                    shared_component: 0,
                    shared_value: e_target,
                    differing_component: 1,
                    differing_values: (qa.0[1], q_star.0[1]),
                })
            } else {
                None
            }
        }
        None => None,
    };

    let conclusive = min_eig > 0.0 && density_witness.is_some() && energy_witness.is_some();
    Ok(CompletenessReport { min_hessian_eigenvalue: min_eig, density_witness, energy_witness, conclusive })
}

/// Window observables of a profile state against the homogeneous values.
#[derive(Debug, Clone)]
pub struct RestrictionPoint {
    pub x: f64,
    pub center_site: usize,
    pub window_density: f64,
    pub window_bond_energy: f64,
    pub homogeneous_density: f64,
    pub homogeneous_energy: f64,
    pub density_deviation: f64,
    pub energy_deviation: f64,
}

#[derive(Debug, Clone)]
pub struct RestrictionReport {
    pub sites: usize,
    pub window: usize,
    pub points: Vec<RestrictionPoint>,
}

/// Restrict a locally-Gibbs profile state to windows around macroscopic
/// points and compare window-averaged observables with the homogeneous Gibbs
/// values at theta(x). Deviations shrink as the volume grows at fixed window,
/// which is the finite-size shadow of the restriction limit.
pub fn local_restriction_check(
    model: &FreeFermionChainModel,
    profile: &LocalGibbsProfile,
    window: usize,
    centers: &[f64],
    quad_tol: f64,
) -> Result<RestrictionReport> {
    let sites = profile.sites;
    if window == 0 || window.is_multiple_of(2) {
        return Err(CoreError::Input(format!("window must be odd and positive, got {window}")));
    }
    if window * 10 > sites {
        return Err(CoreError::Precondition(format!(
            "window {window} too large for {sites} sites (need window << L)"
        )));
    }
    if profile.max_gradient_step() * window as f64 > 0.5 {
        return Err(CoreError::Precondition(
            "profile varies too fast across the window (|grad theta| * window must be small)"
                .into(),
        ));
    }
    let state = ProfileGibbs::new(model, profile)?;
    let mut points = Vec::with_capacity(centers.len());
    for &x in centers {
        if !(0.0..=1.0).contains(&x) {
            return Err(CoreError::Input(format!("center x = {x} outside [0, 1]")));
        }
        let center_site = ((x * sites as f64).round() as usize).min(sites - 1);
        let (wd, wk) = state.window_observables(center_site, window);
        let th = profile.theta_at_site(center_site);
        let q = model.densities_infinity(&ControlVariable(vec![th[0], th[1]]), quad_tol)?;
        points.push(RestrictionPoint {
            x,
            center_site,
            window_density: wd,
            window_bond_energy: wk,
            homogeneous_density: q.0[1],
            homogeneous_energy: q.0[0],
            density_deviation: (wd - q.0[1]).abs(),
            energy_deviation: (wk - q.0[0]).abs(),
        });
    }
    Ok(RestrictionReport { sites, window, points })
}
