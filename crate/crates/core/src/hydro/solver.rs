//! Explicit finite-volume update. The flux sign is fixed by the physical
//! direction test (heat flows from high to low temperature); the test suite
//! asserts it rather than trusting the derivation.

use crate::error::{CoreError, Result};
use crate::num::NeumaierSum;

use super::{Boundary, EndCondition, HydroScenario, HydroState, HydroTrajectory, StepRecord};

/// CFL safety factor: dt = 0.4 h^2 / max_i rho(L(theta_i) |s''(q_i)|).
const CFL_SAFETY: f64 = 0.4;

/// Face fluxes j_{i+1/2} = L(theta_face) (theta_{i+1} - theta_i) / dx with
/// reservoir values held on the walls (gradient over half a cell there).
///
/// Returns `faces` of length cells+1 for end-bounded domains (entries 0 and
/// cells are the wall fluxes) or length cells for periodic domains (entry i
/// is the flux through the face between cells i and i+1 mod M).
pub fn face_fluxes(scenario: &HydroScenario, thetas: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = scenario.cells;
    let n = scenario.dim();
    let h = scenario.spacing();
    let interior = |a: &[f64], b: &[f64]| -> Vec<f64> {
        let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let factor = scenario.onsager.factor(&mid);
        a.iter().zip(b).map(|(x, y)| factor * (y - x) / h).collect()
    };
    match &scenario.boundary {
        Boundary::Periodic => {
            let mut faces = Vec::with_capacity(m);
            for i in 0..m {
                faces.push(interior(&thetas[i], &thetas[(i + 1) % m]));
            }
            faces
        }
        Boundary::Ends { left, right } => {
            let mut faces = Vec::with_capacity(m + 1);
            faces.push(match left {
                EndCondition::NoFlux => vec![0.0; n],
                EndCondition::Reservoir(theta_res) => {
                    let mid: Vec<f64> =
                        theta_res.iter().zip(&thetas[0]).map(|(x, y)| 0.5 * (x + y)).collect();
                    let factor = scenario.onsager.factor(&mid);
                    theta_res
                        .iter()
                        .zip(&thetas[0])
                        .map(|(r, t)| factor * (t - r) / (0.5 * h))
                        .collect()
                }
            });
            for i in 0..m - 1 {
                faces.push(interior(&thetas[i], &thetas[i + 1]));
            }
            faces.push(match right {
                EndCondition::NoFlux => vec![0.0; n],
                EndCondition::Reservoir(theta_res) => {
                    let mid: Vec<f64> = thetas[m - 1]
                        .iter()
                        .zip(theta_res)
                        .map(|(x, y)| 0.5 * (x + y))
                        .collect();
                    let factor = scenario.onsager.factor(&mid);
                    thetas[m - 1]
                        .iter()
                        .zip(theta_res)
                        .map(|(t, r)| factor * (r - t) / (0.5 * h))
                        .collect()
                }
            });
            faces
        }
    }
}

fn flux_into_cell(
    scenario: &HydroScenario,
    faces: &[Vec<f64>],
    i: usize,
) -> (Vec<f64>, Vec<f64>) {
    match &scenario.boundary {
        Boundary::Periodic => {
            let m = scenario.cells;
            (faces[(i + m - 1) % m].clone(), faces[i].clone())
        }
        Boundary::Ends { .. } => (faces[i].clone(), faces[i + 1].clone()),
    }
}

/// Largest stable dt at the current state.
pub fn cfl_dt(scenario: &HydroScenario, state: &HydroState) -> f64 {
    let h = scenario.spacing();
    let mut max_rate = 0.0f64;
    for qi in &state.q {
        let theta = scenario.entropy.grad(qi);
        let factor = scenario.onsager.factor(&theta).abs();
        let hess = scenario.entropy.hessian(qi);
        // spectral radius of a small symmetric matrix via the max |eigenvalue|
        let rho = if hess.nrows() == 1 {
            hess[(0, 0)].abs()
        } else {
            hess.clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()))
        };
        max_rate = max_rate.max(factor * rho);
    }
    if max_rate <= 0.0 {
        return 0.25 * h * h;
    }
    CFL_SAFETY * h * h / max_rate
}

/// One explicit update q_i <- q_i - dt (j_{i+1/2} - j_{i-1/2}) / dx.
///
/// Errors with `StepRejected` when a cell leaves the entropy domain; the
/// caller halves dt and retries.
pub fn step(scenario: &HydroScenario, state: &HydroState, dt: f64) -> Result<HydroState> {
    let h = scenario.spacing();
    let thetas = scenario.thetas(state);
    let faces = face_fluxes(scenario, &thetas);
    let mut q = Vec::with_capacity(state.q.len());
    for (i, qi) in state.q.iter().enumerate() {
        let (jl, jr) = flux_into_cell(scenario, &faces, i);
        let next: Vec<f64> = qi
            .iter()
            .zip(jl.iter().zip(&jr))
            .map(|(v, (l, r))| v - dt * (r - l) / h)
            .collect();
        if !scenario.entropy.domain().contains(&next) {
            return Err(CoreError::StepRejected(format!(
                "cell {i} left the entropy domain at t = {} (q = {next:?})",
                state.t
            )));
        }
        q.push(next);
    }
    Ok(HydroState { q, t: state.t + dt })
}

fn record(scenario: &HydroScenario, state: &HydroState, dt: f64) -> StepRecord {
    let h = scenario.spacing();
    let thetas = scenario.thetas(state);
    let faces = face_fluxes(scenario, &thetas);
    let mut entropy = NeumaierSum::new();
    for qi in &state.q {
        entropy.add(scenario.entropy.eval(qi) * h);
    }
    // per-face production (theta_{i+1} - theta_i) . j, including wall faces
    let mut min_face = f64::INFINITY;
    let mut total = NeumaierSum::new();
    let mut add_face = |dtheta: &[f64], j: &[f64]| {
        let p: f64 = dtheta.iter().zip(j).map(|(d, jj)| d * jj).sum();
        min_face = min_face.min(p);
        total.add(p);
    };
    match &scenario.boundary {
        Boundary::Periodic => {
            let m = scenario.cells;
            for i in 0..m {
                let a = &thetas[i];
                let b = &thetas[(i + 1) % m];
                let dtheta: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
                add_face(&dtheta, &faces[i]);
            }
        }
        Boundary::Ends { left, right } => {
            if let EndCondition::Reservoir(r) = left {
                let dtheta: Vec<f64> = r.iter().zip(&thetas[0]).map(|(x, y)| y - x).collect();
                add_face(&dtheta, &faces[0]);
            }
            for i in 0..scenario.cells - 1 {
                let dtheta: Vec<f64> =
                    thetas[i].iter().zip(&thetas[i + 1]).map(|(x, y)| y - x).collect();
                add_face(&dtheta, &faces[i + 1]);
            }
            if let EndCondition::Reservoir(r) = right {
                let dtheta: Vec<f64> =
                    thetas[scenario.cells - 1].iter().zip(r).map(|(x, y)| y - x).collect();
                add_face(&dtheta, &faces[scenario.cells]);
            }
        }
    }
    StepRecord {
        t: state.t,
        dt,
        totals: state.totals(h),
        entropy: entropy.value(),
        min_face_production: if min_face.is_finite() { min_face } else { 0.0 },
        total_production: total.value(),
    }
}

/// Integrate the scenario to t_final, capturing every checkpoint.
pub fn solve(scenario: &HydroScenario) -> Result<HydroTrajectory> {
    scenario.validate()?;
    let mut state = scenario.initial_state()?;
    let mut checkpoints: Vec<f64> = scenario.checkpoints.clone();
    checkpoints.push(scenario.t_final);
    checkpoints.retain(|&t| t > 0.0 && t <= scenario.t_final + 1e-15);
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

    let mut snapshots = vec![state.clone()];
    let mut steps = Vec::new();
    for &target in &checkpoints {
        while state.t < target - 1e-14 {
            let mut dt = cfl_dt(scenario, &state).min(target - state.t);
            let mut attempt = 0;
            let next = loop {
                match step(scenario, &state, dt) {
                    Ok(s) => break s,
                    Err(CoreError::StepRejected(msg)) => {
                        attempt += 1;
                        if attempt > 25 {
                            return Err(CoreError::StepRejected(format!(
                                "dt exhausted after {attempt} halvings: {msg}"
                            )));
                        }
                        dt *= 0.5;
                    }
                    Err(e) => return Err(e),
                }
            };
            steps.push(record(scenario, &state, dt));
            state = next;
        }
        state.t = target;
        snapshots.push(state.clone());
    }
    // record the final state too so diagnostics cover it
    steps.push(record(scenario, &state, 0.0));
    Ok(HydroTrajectory { snapshots, steps })
}
