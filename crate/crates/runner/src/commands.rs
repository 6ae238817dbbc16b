//! Single-stage subcommands: tabulate thermodynamics, solve hydro, run
//! sampling checks, quantum convergence/KMS/restriction, and the probe.
//! Each writes plot-ready CSV plus a JSON record block into the output dir.

use std::path::Path;

use lte_core::field::ControlField;
use lte_core::fluct::{punctual_covariance_check, scaling_invariance_check, TestFunction};
use lte_core::quantum::{completeness_check, pi_convergence_fermion};
use lte_core::report::{CheckLevel, CheckRecord};
use lte_core::thermo::ControlVariable;

use crate::config::{ModelHandle, ScenarioConfig};
use crate::report::PipelineRecord;

fn write(dir: &Path, name: &str, content: &str) -> anyhow::Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content)?;
    Ok(path)
}

fn records_json(records: &[CheckRecord]) -> String {
    serde_json::to_string_pretty(records).expect("records serialize")
}

/// Tabulate s, pi, q and pi'' over a theta grid.
pub fn cmd_thermo(config: &ScenarioConfig, dir: &Path) -> anyhow::Result<bool> {
    let model = config.build_model()?;
    if matches!(model, ModelHandle::SpinChain(_)) {
        anyhow::bail!(
            "the spin chain exposes no infinite-volume thermodynamic surface; \
             use `quantum` for its finite-volume checks"
        );
    }
    let pressure = model.pressure();
    let dim = model.dim();
    let mut csv = String::new();
    match dim {
        1 => csv.push_str("theta1,pi,q1,s,pi_dd\n"),
        _ => csv.push_str("theta1,theta2,pi,q1,q2,s,pi_dd_11,pi_dd_12,pi_dd_22\n"),
    }
    let grid: Vec<f64> = (0..=40).map(|k| 0.2 + 1.8 * k as f64 / 40.0).collect();
    for &t1 in &grid {
        let theta = if dim == 1 { vec![t1] } else { vec![t1, 0.0] };
        let pi = pressure.eval(&theta);
        let q: Vec<f64> = pressure.grad(&theta).iter().map(|g| -g).collect();
        let s = pi + theta.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>();
        let hess = pressure.hessian(&theta);
        if dim == 1 {
            csv.push_str(&format!("{t1:.8e},{pi:.12e},{:.12e},{s:.12e},{:.12e}\n", q[0], hess[(0, 0)]));
        } else {
            csv.push_str(&format!(
                "{t1:.8e},0,{pi:.12e},{:.12e},{:.12e},{s:.12e},{:.12e},{:.12e},{:.12e}\n",
                q[0],
                q[1],
                hess[(0, 0)],
                hess[(0, 1)],
                hess[(1, 1)]
            ));
        }
    }
    write(dir, "thermo.csv", &csv)?;
    Ok(true)
}

/// Solve the configured hydro scenario.
pub fn cmd_hydro(config: &ScenarioConfig, dir: &Path) -> anyhow::Result<bool> {
    let model = config.build_model()?;
    let scenario = config.hydro_scenario(&model)?;
    let outcome = crate::pipeline::run_pipeline_hydro_only(config, &scenario)?;
    write(dir, "trajectory.csv", &outcome.1)?;
    let records: Vec<PipelineRecord> = outcome.0;
    write(dir, "hydro_report.json", &serde_json::to_string_pretty(&records)?)?;
    Ok(records.iter().all(|r| r.pass))
}

/// Sampling checks at uniform theta plus the punctual probe on the
/// configured scenario's control field.
pub fn cmd_fluct(config: &ScenarioConfig, dir: &Path) -> anyhow::Result<bool> {
    let model = config.build_model()?;
    if matches!(model, ModelHandle::SpinChain(_)) {
        anyhow::bail!("fluctuation sampling needs a model with a pressure surface");
    }
    let pressure = model.pressure();
    let dim = model.dim();
    let theta0 = config.hydro.initial_theta.clone().unwrap_or_else(|| vec![1.0; dim]);
    let field = ControlField::uniform(theta0, config.checks.meso.grid_cells);
    let base = TestFunction::unit_bump(0.0, 1.0, dim);
    let mut records = Vec::new();
    let scaling = scaling_invariance_check(
        &field,
        pressure.as_ref(),
        &base,
        0.5,
        &config.checks.meso.eps,
        config.checks.meso.samples,
        config.seed,
    )?;
    records.push(CheckRecord::flag(CheckLevel::Meso, "fluct/scaling-invariance", scaling.pass));
    let punctual = punctual_covariance_check(
        &field,
        pressure.as_ref(),
        &base,
        0.5,
        &config.checks.meso.eps,
        config.checks.meso.samples,
        config.seed,
    )?;
    let mut csv = String::from("eps,sample_variance,punctual_target,bias\n");
    for row in &punctual.rows {
        csv.push_str(&format!(
            "{:.6e},{:.12e},{:.12e},{:.12e}\n",
            row.eps, row.sample_variance, row.punctual_target, row.bias
        ));
        records.push(CheckRecord::absolute(
            CheckLevel::Meso,
            format!("fluct/variance-band/eps={}", row.eps),
            row.sample_variance,
            row.punctual_target,
            3.0 * row.std_error,
        ));
    }
    write(dir, "fluct.csv", &csv)?;
    write(dir, "fluct_report.json", &records_json(&records))?;
    Ok(records.iter().all(|r| r.pass))
}

/// Reduced-pressure convergence, completeness and restriction for the
/// fermion chain (other models get the applicable subset).
pub fn cmd_quantum(config: &ScenarioConfig, dir: &Path) -> anyhow::Result<bool> {
    let model = config.build_model()?;
    let mut records = Vec::new();
    let mut csv = String::from("sites,pi_l,deviation\n");
    if let ModelHandle::FreeFermion(ff) = &model {
        let theta = ControlVariable(
            config.hydro.initial_theta.clone().unwrap_or_else(|| vec![1.0, 0.0]),
        );
        let sizes: Vec<usize> = (3..=10).map(|k| 1usize << k).collect();
        let conv = pi_convergence_fermion(ff, &theta, &sizes, 1e-10)?;
        let devs = conv.deviations.clone().unwrap();
        for (i, &l) in conv.sizes.iter().enumerate() {
            csv.push_str(&format!("{l},{:.12e},{:.12e}\n", conv.pi_values[i], devs[i]));
        }
        records.push(CheckRecord::flag(
            CheckLevel::Micro,
            "quantum/pi-deviation-monotone",
            conv.monotone_above_floor,
        ));
        records.push(CheckRecord::upper_bound(
            CheckLevel::Micro,
            "quantum/pi-extrapolation-vs-quadrature",
            (conv.extrapolated - conv.reference.unwrap()).abs(),
            1e-6,
        ));
        let comp = completeness_check(ff, (0.5, 2.0), (-1.0, 1.0), 5, 1e-10)?;
        records.push(CheckRecord::flag(CheckLevel::Micro, "quantum/completeness", comp.conclusive));
    }
    write(dir, "pi_vs_L.csv", &csv)?;
    write(dir, "quantum_report.json", &records_json(&records))?;
    Ok(records.iter().all(|r| r.pass))
}

/// Probe thermalization at the configured beta.
pub fn cmd_zeroth(config: &ScenarioConfig, dir: &Path) -> anyhow::Result<bool> {
    use lte_core::zeroth::{thermalization_check, ProbeSystem, RateProfile};
    use num_complex::Complex64;
    let beta = config.hydro.initial_theta.as_ref().map(|t| t[0]).unwrap_or(1.0);
    let probe = ProbeSystem::qubit(config.checks.probe.omega0);
    let z = Complex64::new(0.0, 0.0);
    let rho0 = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[z, z, z, Complex64::new(1.0, 0.0)],
    );
    let rep = thermalization_check(
        &probe,
        beta,
        RateProfile::Flat { gamma0: config.checks.probe.gamma0 },
        &rho0,
        config.checks.probe.tau_max,
        config.checks.probe.points,
    )?;
    let mut csv = String::from("tau,trace_distance\n");
    for (tau, d) in rep.taus.iter().zip(&rep.distances) {
        csv.push_str(&format!("{tau:.6e},{d:.12e}\n"));
    }
    write(dir, "probe.csv", &csv)?;
    let records = vec![
        CheckRecord::upper_bound(CheckLevel::Zeroth, "zeroth/final-distance", rep.final_distance, 1e-6),
        CheckRecord::flag(CheckLevel::Zeroth, "zeroth/contractive", rep.monotone),
    ];
    write(dir, "zeroth_report.json", &records_json(&records))?;
    Ok(records.iter().all(|r| r.pass))
}

/// Built-in default configuration (driven paramagnet).
pub const DEFAULT_CONFIG: &str = r#"
seed = 20260808

[model]
kind = "paramagnet"
epsilon = 1.0

[hydro]
mode = "steady"
cells = 64
theta_left = [0.5]
theta_right = [1.5]
t_final = 1.0

[checks]
points = [[0.25, 0.5], [0.75, 0.5]]

[checks.meso]
samples = 20000
eps = [0.2, 0.1]
grid_cells = 400
"#;
