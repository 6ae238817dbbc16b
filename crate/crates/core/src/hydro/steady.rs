//! Driven stationary profiles: Newton iteration on the discrete
//! div(L(theta) grad theta) = 0 for scalar models, with a pseudo-time
//! relaxation fallback that also covers multi-component control fields.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};

use super::{Boundary, EndCondition, HydroScenario, HydroState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    Newton,
    Relaxation,
}

pub struct SteadyState {
    pub state: HydroState,
    pub thetas: Vec<Vec<f64>>,
    /// Max flux-divergence magnitude over cells.
    pub residual: f64,
    pub method: SteadyMethod,
}

fn reservoirs(scenario: &HydroScenario) -> Result<(Vec<f64>, Vec<f64>)> {
    match &scenario.boundary {
        Boundary::Ends {
            left: EndCondition::Reservoir(a),
            right: EndCondition::Reservoir(b),
        } => Ok((a.clone(), b.clone())),
        _ => Err(CoreError::Precondition(
            "steady state needs reservoir conditions at both ends".into(),
        )),
    }
}

/// Flux divergence per cell for a theta field (componentwise).
fn divergence(scenario: &HydroScenario, thetas: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let faces = super::face_fluxes(scenario, thetas);
    let h = scenario.spacing();
    (0..scenario.cells)
        .map(|i| {
            faces[i]
                .iter()
                .zip(&faces[i + 1])
                .map(|(l, r)| (r - l) / h)
                .collect()
        })
        .collect()
}

fn max_abs(v: &[Vec<f64>]) -> f64 {
    v.iter().flat_map(|c| c.iter()).fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Scalar Newton path: full finite-difference Jacobian (the system is
/// tridiagonal, but at test sizes the dense solve is cheap and simple).
fn newton_scalar(scenario: &HydroScenario, start: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let m = scenario.cells;
    let mut theta = start;
    let eval = |th: &[f64]| -> Vec<f64> {
        let fields: Vec<Vec<f64>> = th.iter().map(|&t| vec![t]).collect();
        divergence(scenario, &fields).iter().map(|d| d[0]).collect()
    };
    for _ in 0..40 {
        let f0 = eval(&theta);
        let res = f0.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if res < 1e-11 {
            return Ok((theta, res));
        }
        let mut jac = DMatrix::<f64>::zeros(m, m);
        let mut th = theta.clone();
        for k in 0..m {
            let dk = 1e-7 * (1.0 + theta[k].abs());
            th[k] = theta[k] + dk;
            let fp = eval(&th);
            th[k] = theta[k] - dk;
            let fm = eval(&th);
            th[k] = theta[k];
            for r in 0..m {
                jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * dk);
            }
        }
        let rhs = DVector::from_vec(f0);
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| CoreError::Convergence("singular steady-state Jacobian".into()))?;
        for k in 0..m {
            theta[k] -= delta[k];
        }
        if delta.amax() < 1e-14 {
            break;
        }
    }
    let f = eval(&theta);
    Ok((theta, f.iter().fold(0.0f64, |a, v| a.max(v.abs()))))
}

/// Pseudo-time relaxation of d theta / d tau = div(L grad theta); works for
/// any component count because the stationary equation is posed in theta.
fn relax(scenario: &HydroScenario, mut thetas: Vec<Vec<f64>>) -> (Vec<Vec<f64>>, f64) {
    let h = scenario.spacing();
    let n = scenario.dim();
    // stable pseudo-step for the theta diffusion
    let mut max_factor: f64 = 0.0;
    for th in &thetas {
        max_factor = max_factor.max(scenario.onsager.factor(th).abs());
    }
    let dtau = 0.4 * h * h / max_factor.max(1e-12);
    let mut residual = f64::INFINITY;
    for _ in 0..4_000_000 {
        let div = divergence(scenario, &thetas);
        residual = max_abs(&div);
        if residual < 1e-11 {
            break;
        }
        for i in 0..scenario.cells {
            for c in 0..n {
                thetas[i][c] += dtau * div[i][c];
            }
        }
    }
    (thetas, residual)
}

/// Solve div(L(theta) grad theta) = 0 with reservoir ends.
pub fn steady_state(scenario: &HydroScenario) -> Result<SteadyState> {
    scenario.validate()?;
    let (ta, tb) = reservoirs(scenario)?;
    let n = scenario.dim();
    // linear interpolation between the reservoirs as the starting guess
    let start: Vec<Vec<f64>> = (0..scenario.cells)
        .map(|i| {
            let u = (i as f64 + 0.5) / scenario.cells as f64;
            (0..n).map(|c| ta[c] + (tb[c] - ta[c]) * u).collect()
        })
        .collect();

    let (thetas, residual, method) = if n == 1 {
        match newton_scalar(scenario, start.iter().map(|t| t[0]).collect()) {
            Ok((theta, res)) if res < 1e-10 => {
                (theta.iter().map(|&t| vec![t]).collect(), res, SteadyMethod::Newton)
            }
            _ => {
                let (t, r) = relax(scenario, start);
                (t, r, SteadyMethod::Relaxation)
            }
        }
    } else {
        let (t, r) = relax(scenario, start);
        (t, r, SteadyMethod::Relaxation)
    };

    if residual > 1e-10 {
        return Err(CoreError::Convergence(format!(
            "steady state stalled at flux-divergence residual {residual}"
        )));
    }
    let q: Vec<Vec<f64>> = thetas
        .iter()
        .map(|th| scenario.pressure.grad(th).iter().map(|g| -g).collect())
        .collect();
    Ok(SteadyState { state: HydroState { q, t: f64::INFINITY }, thetas, residual, method })
}
