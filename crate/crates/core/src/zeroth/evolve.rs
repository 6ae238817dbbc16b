//! Probe relaxation: exact propagation through the exponentiated vectorized
//! Liouvillian, trace-distance monitoring and the composition with a hydro
//! control field (the probe reads its bath temperature off theta_1(x, t)).

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::field::ControlFieldHistory;
use crate::num::expm;

use super::davies::{build_davies_generator, RateProfile, ThermalGenerator};
use super::{trace_distance, CMat, ProbeSystem};

fn vec_rho(rho: &CMat) -> DVector<Complex64> {
    let d = rho.nrows();
    DVector::from_iterator(d * d, (0..d * d).map(|k| rho[(k % d, k / d)]))
}

fn unvec_rho(v: &DVector<Complex64>, d: usize) -> CMat {
    CMat::from_fn(d, d, |i, j| v[j * d + i])
}

fn check_density(rho: &CMat, dim: usize) -> Result<()> {
    let tr: Complex64 = (0..dim).map(|i| rho[(i, i)]).sum();
    if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(CoreError::Integrator(format!("trace drifted to {tr}")));
    }
    let eig = rho.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-10 {
        return Err(CoreError::Integrator(format!("negative population {min}")));
    }
    Ok(())
}

/// rho(tau) = exp(L tau) rho0 through the dense vectorized Liouvillian.
pub fn evolve(generator: &ThermalGenerator, rho0: &CMat, tau: f64) -> Result<CMat> {
    let dim = generator.dim;
    if rho0.nrows() != dim || rho0.ncols() != dim {
        return Err(CoreError::Input("initial state dimension mismatch".into()));
    }
    check_density(rho0, dim)
        .map_err(|_| CoreError::Input("rho0 is not a valid density matrix".into()))?;
    if tau == 0.0 {
        return Ok(rho0.clone());
    }
    if tau < 0.0 {
        return Err(CoreError::Input("tau must be nonnegative".into()));
    }
    let propagator = expm(&(generator.liouvillian() * Complex64::new(tau, 0.0)));
    let rho = unvec_rho(&(propagator * vec_rho(rho0)), dim);
    check_density(&rho, dim)?;
    // re-Hermitize away round-off
    Ok((&rho + rho.adjoint()) * Complex64::new(0.5, 0.0))
}

#[derive(Debug, Clone)]
pub struct ThermalizationReport {
    pub beta: f64,
    pub taus: Vec<f64>,
    pub distances: Vec<f64>,
    pub final_distance: f64,
    /// D(tau) never increases along the grid (within 1e-12).
    pub monotone: bool,
    /// Exponential rate fitted on ln D vs tau (where D is resolvable).
    pub fitted_rate: Option<f64>,
    pub converged: bool,
    /// Spectral-gap estimate from the Liouvillian (diagnostic on failure).
    pub gap_estimate: f64,
}

/// Track the trace distance to Gibbs(beta) on a uniform tau grid.
pub fn thermalization_check(
    probe: &ProbeSystem,
    beta: f64,
    profile: RateProfile,
    rho0: &CMat,
    tau_max: f64,
    points: usize,
) -> Result<ThermalizationReport> {
    if tau_max <= 0.0 || points < 2 {
        return Err(CoreError::Input("need tau_max > 0 and at least 2 grid points".into()));
    }
    let gen = build_davies_generator(probe, beta, profile)?;
    let dim = gen.dim;
    let mut taus = Vec::with_capacity(points);
    let mut distances = Vec::with_capacity(points);
    // step propagator reused across the uniform grid
    let dt = tau_max / (points - 1) as f64;
    let step = expm(&(gen.liouvillian() * Complex64::new(dt, 0.0)));
    let mut v = vec_rho(rho0);
    for k in 0..points {
        let tau = k as f64 * dt;
        let rho = unvec_rho(&v, dim);
        check_density(&rho, dim)?;
        taus.push(tau);
        distances.push(trace_distance(&rho, &gen.gibbs));
        if k + 1 < points {
            v = &step * v;
        }
    }
    let final_distance = *distances.last().unwrap();
    let monotone = distances.windows(2).all(|w| w[1] <= w[0] + 1e-12);

    // least-squares fit of ln D against tau over resolvable distances
    let pts: Vec<(f64, f64)> = taus
        .iter()
        .zip(&distances)
        .filter(|(_, &d)| d > 1e-13)
        .map(|(&t, &d)| (t, d.ln()))
        .collect();
    let fitted_rate = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        (denom.abs() > 1e-12).then(|| -(n * sxy - sx * sy) / denom)
    } else {
        None
    };

    // decay-rate estimate doubles as the spectral-gap diagnostic on failure
    let gap_estimate = fitted_rate.unwrap_or(f64::INFINITY);

    Ok(ThermalizationReport {
        beta,
        taus,
        distances,
        final_distance,
        monotone,
        fitted_rate,
        converged: final_distance < 1e-6,
        gap_estimate,
    })
}

/// Least-squares inverse temperature read off a state's populations in the
/// eigenbasis of H (the probe's own thermometer).
pub fn fit_beta_from_state(rho: &CMat, h: &CMat) -> Result<f64> {
    let eig = h.clone().symmetric_eigen();
    let u = &eig.eigenvectors;
    let pops = u.adjoint() * rho * u;
    let pts: Vec<(f64, f64)> = (0..h.nrows())
        .map(|m| (eig.eigenvalues[m], pops[(m, m)].re))
        .filter(|&(_, p)| p > 1e-300)
        .map(|(e, p)| (e, p.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(CoreError::Input("not enough populated levels to fit beta".into()));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-14 {
        return Err(CoreError::Input("degenerate level spread; beta fit ill-posed".into()));
    }
    Ok(-(n * sxy - sx * sy) / denom)
}

#[derive(Debug, Clone)]
pub struct ProbeSceneReport {
    pub x: f64,
    pub t: f64,
    /// Local inverse temperature theta_1(x, t) read from the control field.
    pub beta: f64,
    pub report: ThermalizationReport,
    /// Populations of the final state in the probe eigenbasis.
    pub stationary_populations: Vec<f64>,
}

/// Place a probe at (x, t) of a hydro control field: the bath temperature is
/// the local one, and the probe must thermalize to Gibbs(theta_1(x, t)).
#[allow(clippy::too_many_arguments)]
pub fn local_probe_scenario(
    history: &ControlFieldHistory,
    x: f64,
    t: f64,
    probe: &ProbeSystem,
    profile: RateProfile,
    rho0: &CMat,
    tau_max: f64,
    points: usize,
) -> Result<ProbeSceneReport> {
    let theta = history.theta_at(x, t)?;
    let beta = theta[0];
    if beta <= 0.0 {
        return Err(CoreError::Domain(format!(
            "control field gives nonpositive theta_1 = {beta} at (x, t) = ({x}, {t})"
        )));
    }
    let report = thermalization_check(probe, beta, profile, rho0, tau_max, points)?;
    let gen = build_davies_generator(probe, beta, profile)?;
    let rho_final = evolve(&gen, rho0, tau_max)?;
    let eig = probe.hamiltonian.clone().symmetric_eigen();
    let pops_mat = eig.eigenvectors.adjoint() * &rho_final * &eig.eigenvectors;
    let mut level_pop: Vec<(f64, f64)> =
        (0..probe.dim()).map(|m| (eig.eigenvalues[m], pops_mat[(m, m)].re)).collect();
    level_pop.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ProbeSceneReport {
        x,
        t,
        beta,
        report,
        stationary_populations: level_pop.into_iter().map(|(_, p)| p).collect(),
    })
}
