//! Diffusive scale invariance: the evolution is unchanged under
//! x -> lambda x, t -> lambda^c t with c = 2 for this constitutive class.
//! A base run and a spatially stretched run integrated lambda^2 longer must
//! agree at corresponding points within discretization error.

use crate::error::{CoreError, Result};

use super::{solve, HydroScenario};

#[derive(Debug, Clone)]
pub struct ScaleInvarianceReport {
    pub lambda: f64,
    /// Max-norm disagreement over base cells and components.
    pub max_mismatch: f64,
    /// 10 h^2 with h the base spacing.
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare a base run against its lambda-stretched counterpart.
///
/// The stretched scenario lives on [0, lambda * length] with lambda * M
/// cells (same spacing), carries the same initial profile in the relative
/// coordinate, and is integrated to lambda^c * t_final.
pub fn scale_invariance_check(
    scenario: &HydroScenario,
    lambda: usize,
) -> Result<ScaleInvarianceReport> {
    scenario.validate()?;
    if (scenario.scaling_exponent - 2.0).abs() > 1e-12 {
        return Err(CoreError::Precondition(format!(
            "scale-invariance check implemented for the diffusive class c = 2 only; \
             scenario declares c = {} (non-diffusive constitutive classes scale differently)",
            scenario.scaling_exponent
        )));
    }
    if lambda == 0 {
        return Err(CoreError::Input("lambda must be positive".into()));
    }
    if !matches!(scenario.boundary, super::Boundary::Periodic) {
        return Err(CoreError::Precondition(
            "scale-invariance comparison needs periodic (matched) boundaries".into(),
        ));
    }

    let base = solve(scenario)?;

    let mut stretched_scenario = scenario.clone();
    stretched_scenario.cells = scenario.cells * lambda;
    stretched_scenario.domain_length = scenario.domain_length * lambda as f64;
    let lam = lambda as f64;
    let lam_c = lam.powf(scenario.scaling_exponent);
    stretched_scenario.t_final = scenario.t_final * lam_c;
    stretched_scenario.checkpoints = vec![];
    let stretched = solve(&stretched_scenario)?;

    let qb = &base.final_state().q;
    let qs = &stretched.final_state().q;
    let n = scenario.dim();
    let hs = stretched_scenario.spacing();
    let mut max_mismatch = 0.0f64;
    for (i, qb_i) in qb.iter().enumerate() {
        let x = scenario.cell_center(i) * lam;
        // linear interpolation of the stretched field at lambda * x_i
        let pos = x / hs - 0.5;
        let j0 = pos.floor();
        let w = pos - j0;
        let m = stretched_scenario.cells as i64;
        let ja = ((j0 as i64 % m) + m) % m;
        let jb = (ja + 1) % m;
        for c in 0..n {
            let interp = (1.0 - w) * qs[ja as usize][c] + w * qs[jb as usize][c];
            max_mismatch = max_mismatch.max((interp - qb_i[c]).abs());
        }
    }
    let h = scenario.spacing();
    let tolerance = 10.0 * h * h;
    Ok(ScaleInvarianceReport { lambda: lam, max_mismatch, tolerance, pass: max_mismatch <= tolerance })
}
