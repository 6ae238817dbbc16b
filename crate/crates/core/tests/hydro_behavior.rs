//! Solver behavior against closed-form hydrodynamics: relaxation spectra,
//! steady profiles, scale invariance on the nonlinear model.

use std::sync::Arc;

use lte_core::hydro::{
    scale_invariance_check, solve, steady_state, Boundary, EndCondition, HydroScenario,
    InitialData, OnsagerLaw,
};
use lte_core::models::{ParamagnetModel, QuadraticModel};

fn quadratic_periodic(cells: usize, amplitude: f64, t_final: f64) -> HydroScenario {
    let m = QuadraticModel::default();
    HydroScenario {
        entropy: Arc::new(m.entropy()),
        pressure: Arc::new(m.pressure()),
        onsager: OnsagerLaw::Constant { mobility: 1.0 },
        cells,
        domain_length: 1.0,
        boundary: Boundary::Periodic,
        initial: InitialData::SineMode { mean: vec![0.0], amplitude: vec![amplitude], wavenumber: 1 },
        scaling_exponent: 2.0,
        t_final,
        checkpoints: vec![],
    }
}

#[test]
fn slowest_mode_decays_at_the_diffusive_rate() {
    // single k = 1 mode of the linear heat equation decays as
    // exp(-mobility (2 pi)^2 t); amplitude within 1% at t = 0.01, M = 256
    let sc = quadratic_periodic(256, 0.1, 0.01);
    let traj = solve(&sc).unwrap();
    let h = sc.spacing();
    // project the final state back onto the initial mode
    let mut amp = 0.0;
    for (i, q) in traj.final_state().q.iter().enumerate() {
        let x = (i as f64 + 0.5) * h;
        amp += 2.0 * h * q[0] * (2.0 * std::f64::consts::PI * x).sin();
    }
    let expect = 0.1 * (-(2.0 * std::f64::consts::PI).powi(2) * 0.01).exp();
    assert!(
        ((amp - expect) / expect).abs() < 0.01,
        "amplitude {amp} vs {expect}"
    );
}

#[test]
fn driven_paramagnet_profile_and_flux_are_linear_and_constant() {
    let m = ParamagnetModel::new(1.0);
    let sc = HydroScenario {
        entropy: Arc::new(m.entropy()),
        pressure: Arc::new(m.pressure()),
        onsager: OnsagerLaw::Constant { mobility: 1.0 },
        cells: 64,
        domain_length: 1.0,
        boundary: Boundary::Ends {
            left: EndCondition::Reservoir(vec![0.5]),
            right: EndCondition::Reservoir(vec![1.5]),
        },
        initial: InitialData::ThetaUniform { theta: vec![1.0] },
        scaling_exponent: 2.0,
        t_final: 1.0,
        checkpoints: vec![],
    };
    let ss = steady_state(&sc).unwrap();
    // face fluxes constant across the domain
    let faces = lte_core::hydro::face_fluxes(&sc, &ss.thetas);
    let j0 = faces[1][0];
    for f in &faces {
        assert!((f[0] - j0).abs() < 1e-9, "flux {} vs {j0}", f[0]);
    }
    // q(x) = -tanh(0.5 + x)
    for (i, q) in ss.state.q.iter().enumerate() {
        let x = sc.cell_center(i);
        assert!((q[0] + (0.5 + x).tanh()).abs() < 1e-9);
    }
}

#[test]
fn nonlinear_scale_invariance_paramagnet() {
    let m = ParamagnetModel::new(1.0);
    let sc = HydroScenario {
        entropy: Arc::new(m.entropy()),
        pressure: Arc::new(m.pressure()),
        onsager: OnsagerLaw::Constant { mobility: 1.0 },
        cells: 64,
        domain_length: 1.0,
        boundary: Boundary::Periodic,
        initial: InitialData::SineMode {
            mean: vec![-(1.0f64.tanh())],
            amplitude: vec![0.2],
            wavenumber: 1,
        },
        scaling_exponent: 2.0,
        t_final: 0.004,
        checkpoints: vec![],
    };
    let rep = scale_invariance_check(&sc, 2).unwrap();
    assert!(rep.pass, "mismatch {} tolerance {}", rep.max_mismatch, rep.tolerance);
}

#[test]
fn step_rejection_reported_when_domain_exited() {
    // quadratic entropy on a narrow domain: a huge dt drives q out of range
    let m = QuadraticModel { half_width: 0.35 };
    let sc = HydroScenario {
        entropy: Arc::new(m.entropy()),
        pressure: Arc::new(m.pressure()),
        onsager: OnsagerLaw::Constant { mobility: 1.0 },
        cells: 8,
        domain_length: 1.0,
        boundary: Boundary::Ends { left: EndCondition::NoFlux, right: EndCondition::NoFlux },
        initial: InitialData::Step { left: vec![0.3], right: vec![-0.3], split: 0.5 },
        scaling_exponent: 2.0,
        t_final: 0.0,
        checkpoints: vec![],
    };
    let state = sc.initial_state().unwrap();
    let err = lte_core::hydro::step(&sc, &state, 10.0).unwrap_err();
    assert!(matches!(err, lte_core::CoreError::StepRejected(_)));
}
