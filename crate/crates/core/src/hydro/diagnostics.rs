//! Entropy bookkeeping along a trajectory: total entropy S(t), per-face
//! production positivity, conservation drift and the driven stationary
//! balance between bulk production and boundary entropy flux.

use crate::error::Result;

use super::{Boundary, EndCondition, HydroScenario, HydroTrajectory};

#[derive(Debug, Clone)]
pub struct EntropyReport {
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    /// Most negative face production seen anywhere along the run.
    pub min_face_production: f64,
    /// Largest backward step of S(t) (0 for a monotone closed run).
    pub max_entropy_decrease: f64,
    /// Largest change of any conserved total across a single step
    /// (no-flux runs; the same face flux enters both neighbors, so this is
    /// pure round-off).
    pub max_total_drift_per_step: f64,
    /// True when every boundary is NoFlux or the domain is periodic.
    pub closed: bool,
    /// Stationary balance residual |production - boundary entropy flux| at
    /// the final step (driven runs only).
    pub stationary_balance_residual: Option<f64>,
}

pub fn entropy_diagnostics(
    scenario: &HydroScenario,
    trajectory: &HydroTrajectory,
) -> Result<EntropyReport> {
    let steps = &trajectory.steps;
    let times: Vec<f64> = steps.iter().map(|s| s.t).collect();
    let entropy: Vec<f64> = steps.iter().map(|s| s.entropy).collect();
    let min_face_production =
        steps.iter().map(|s| s.min_face_production).fold(f64::INFINITY, f64::min);

    let closed = match &scenario.boundary {
        Boundary::Periodic => true,
        Boundary::Ends { left, right } => {
            matches!(left, EndCondition::NoFlux) && matches!(right, EndCondition::NoFlux)
        }
    };

    let mut max_entropy_decrease = 0.0f64;
    if closed {
        for w in entropy.windows(2) {
            max_entropy_decrease = max_entropy_decrease.max(w[0] - w[1]);
        }
    }

    let mut max_total_drift_per_step = 0.0f64;
    if closed && steps.len() > 1 {
        for w in steps.windows(2) {
            for (a, b) in w[0].totals.iter().zip(&w[1].totals) {
                max_total_drift_per_step = max_total_drift_per_step.max((a - b).abs());
            }
        }
    }

    // Driven stationarity: production inside equals entropy flux through the
    // reservoirs, theta_b . j_b - theta_a . j_a, exactly by telescoping.
    let stationary_balance_residual = if closed {
        None
    } else {
        let state = trajectory.final_state();
        let thetas = scenario.thetas(state);
        let faces = super::face_fluxes(scenario, &thetas);
        if let Boundary::Ends { left, right } = &scenario.boundary {
            let mut boundary_flux = 0.0;
            if let EndCondition::Reservoir(r) = right {
                boundary_flux +=
                    r.iter().zip(faces.last().unwrap()).map(|(t, j)| t * j).sum::<f64>();
            }
            if let EndCondition::Reservoir(r) = left {
                boundary_flux -= r.iter().zip(&faces[0]).map(|(t, j)| t * j).sum::<f64>();
            }
            let production = trajectory.steps.last().map(|s| s.total_production).unwrap_or(0.0);
            Some((production - boundary_flux).abs())
        } else {
            None
        }
    };

    Ok(EntropyReport {
        times,
        entropy,
        min_face_production,
        max_entropy_decrease,
        max_total_drift_per_step,
        closed,
        stationary_balance_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydro::{solve, EndCondition, HydroScenario, InitialData, OnsagerLaw};
    use crate::models::ParamagnetModel;
    use std::sync::Arc;

    fn scenario(boundary: Boundary, initial: InitialData, t_final: f64) -> HydroScenario {
        let m = ParamagnetModel::new(1.0);
        HydroScenario {
            entropy: Arc::new(m.entropy()),
            pressure: Arc::new(m.pressure()),
            onsager: OnsagerLaw::Constant { mobility: 1.0 },
            cells: 32,
            domain_length: 1.0,
            boundary,
            initial,
            scaling_exponent: 2.0,
            t_final,
            checkpoints: vec![],
        }
    }

    #[test]
    fn closed_relaxation_obeys_second_law() {
        let sc = scenario(
            Boundary::Ends { left: EndCondition::NoFlux, right: EndCondition::NoFlux },
            InitialData::Step {
                left: vec![-(0.5f64.tanh())],
                right: vec![-(1.5f64.tanh())],
                split: 0.5,
            },
            0.5,
        );
        let traj = solve(&sc).unwrap();
        let rep = entropy_diagnostics(&sc, &traj).unwrap();
        assert!(rep.closed);
        assert!(rep.min_face_production >= -1e-12, "face production {}", rep.min_face_production);
        assert!(rep.max_entropy_decrease <= 1e-12, "entropy decrease {}", rep.max_entropy_decrease);
        assert!(rep.max_total_drift_per_step < 1e-12, "drift {}", rep.max_total_drift_per_step);
        // strictly increasing until uniform
        let first = rep.entropy.first().unwrap();
        let last = rep.entropy.last().unwrap();
        assert!(last > first);
    }

    #[test]
    fn equilibrium_trajectory_keeps_entropy_constant() {
        let theta = -(1.0f64);
        let _ = theta;
        let sc = scenario(
            Boundary::Ends { left: EndCondition::NoFlux, right: EndCondition::NoFlux },
            InitialData::ThetaUniform { theta: vec![1.0] },
            0.2,
        );
        let traj = solve(&sc).unwrap();
        let rep = entropy_diagnostics(&sc, &traj).unwrap();
        let s0 = rep.entropy.first().unwrap();
        for s in &rep.entropy {
            assert!((s - s0).abs() < 1e-13);
        }
    }

    #[test]
    fn driven_steady_state_balances_boundary_flux() {
        let sc = scenario(
            Boundary::Ends {
                left: EndCondition::Reservoir(vec![0.5]),
                right: EndCondition::Reservoir(vec![1.5]),
            },
            InitialData::ThetaUniform { theta: vec![1.0] },
            3.0,
        );
        let traj = solve(&sc).unwrap();
        let rep = entropy_diagnostics(&sc, &traj).unwrap();
        let residual = rep.stationary_balance_residual.unwrap();
        assert!(residual < 1e-8, "balance residual {residual}");
    }
}
