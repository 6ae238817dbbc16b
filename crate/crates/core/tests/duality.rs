//! Cross-module conjugation checks and property tests of the convex layer.

use lte_core::models::{DoubleWellEntropyModel, ParamagnetModel, QuadraticModel};
use lte_core::thermo::{
    concave_envelope, legendre_transform, q_of_theta, tangent_set, theta_of_q, ControlVariable,
    Entropy, NumericConjugate, Pressure, StateDensity, TabulatedEntropy, TabulatedPressure,
};
use proptest::prelude::*;

#[test]
fn paramagnet_inverse_maps_round_trip() {
    let m = ParamagnetModel::new(1.0);
    for theta in [-1.2, -0.3, 0.0, 0.7, 1.0, 1.9] {
        let q = q_of_theta(&m.pressure(), &ControlVariable::scalar(theta)).unwrap();
        let back = theta_of_q(&m.entropy(), &q).unwrap();
        assert!((back.0[0] - theta).abs() < 1e-10, "theta {theta} -> {}", back.0[0]);
    }
    // closed-form inverse: e = -tanh(1) maps back to theta = 1
    let th = theta_of_q(&m.entropy(), &StateDensity::scalar(-(1.0f64.tanh()))).unwrap();
    assert!((th.0[0] - 1.0).abs() < 1e-12);
    // symmetric point
    let th = theta_of_q(&m.entropy(), &StateDensity::scalar(0.0)).unwrap();
    assert!(th.0[0].abs() < 1e-12);
}

#[test]
fn coexistence_kink_reported_as_non_differentiable() {
    let dw = DoubleWellEntropyModel::new(401);
    let pi = dw.tabulated_pressure(501, 2.5).unwrap();
    let err = q_of_theta(&pi, &ControlVariable::scalar(0.0)).unwrap_err();
    assert!(matches!(err, lte_core::CoreError::NonDifferentiable { .. }), "{err}");
    // away from the kink the derivative exists and matches the pure phase
    let q = q_of_theta(&pi, &ControlVariable::scalar(1.5)).unwrap();
    assert!(q.0[0] < -1.0, "beyond the flat stretch the density passes the well: {:?}", q);
}

#[test]
fn tangent_set_matches_double_well_geometry() {
    let dw = DoubleWellEntropyModel::new(401);
    let pi = dw.tabulated_pressure(501, 2.5).unwrap();
    let ts = tangent_set(&pi, 0.0).unwrap();
    let spacing = 5.0 / 500.0;
    assert!((ts.r_min + 1.0).abs() < 2.0 * spacing);
    assert!((ts.r_max - 1.0).abs() < 2.0 * spacing);
    let dens = ts.extremal_densities();
    assert_eq!(dens.len(), 2);
    // pure phases at -1 and +1
    assert!(dens.iter().any(|d| (d - 1.0).abs() < 2.0 * spacing));
    assert!(dens.iter().any(|d| (d + 1.0).abs() < 2.0 * spacing));
}

#[test]
fn numeric_conjugate_of_conjugate_is_envelope() {
    // biconjugation on the double well: conjugate the envelope, then
    // conjugate back through the dual infimum, and compare on the region
    // whose slopes the theta grid covers
    let dw = DoubleWellEntropyModel::new(201);
    let env = dw.entropy().unwrap();
    let pi = dw.tabulated_pressure(801, 4.0).unwrap();
    for i in (1..200).step_by(7) {
        let q = env.grid()[i];
        let slope =
            (env.values()[i + 1] - env.values()[i - 1]) / (env.grid()[i + 1] - env.grid()[i - 1]);
        if slope.abs() > 3.5 {
            continue;
        }
        let mut best = f64::INFINITY;
        for (k, &th) in pi.grid().iter().enumerate() {
            best = best.min(pi.values()[k] + th * q);
        }
        assert!(
            (best - env.values()[i]).abs() < 2e-2,
            "biconjugate at q = {q}: {best} vs {}",
            env.values()[i]
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The envelope majorizes its input, touches it somewhere, and is
    /// invariant under a second application.
    #[test]
    fn envelope_is_least_concave_majorant(values in prop::collection::vec(-5.0f64..5.0, 8..40)) {
        let n = values.len();
        let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let env = concave_envelope(&grid, &values).unwrap();
        // majorant
        for (v, e) in values.iter().zip(env.values()) {
            prop_assert!(e + 1e-12 >= *v);
        }
        // touches the data at the hull vertices
        let touches = values.iter().zip(env.values()).any(|(v, e)| (e - v).abs() < 1e-12);
        prop_assert!(touches);
        // midpoint concavity on the grid
        for i in 1..n - 1 {
            let mid = 0.5 * (env.values()[i - 1] + env.values()[i + 1]);
            prop_assert!(env.values()[i] + 1e-10 >= mid);
        }
        // idempotent
        let twice = concave_envelope(env.grid(), env.values()).unwrap();
        for (a, b) in env.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    /// For concave tabulated data the numeric sup attains
    /// pi(theta) >= s(q) - theta q on the whole grid, with equality at q*.
    #[test]
    fn conjugate_dominates_tangents(theta in -2.0f64..2.0) {
        let m = QuadraticModel::default();
        let (pi, q_star) = legendre_transform(&m.entropy(), &ControlVariable::scalar(theta)).unwrap();
        for k in 0..=40 {
            let q = -3.0 + 6.0 * k as f64 / 40.0;
            let lower = Entropy::eval(&m.entropy(), &[q]) - theta * q;
            prop_assert!(pi + 1e-9 >= lower, "pi {pi} < value {lower} at q {q}");
        }
        prop_assert!((pi - (Entropy::eval(&m.entropy(), q_star.as_slice()) - theta * q_star.0[0])).abs() < 1e-12);
    }

    /// Tabulated conjugation of a random concave parabola family recovers
    /// the closed-form conjugate at interior grid points.
    #[test]
    fn tabulated_pressure_matches_closed_form(curv in 0.4f64..2.0, shift in -0.5f64..0.5) {
        // s(q) = -curv (q - shift)^2 / 2 => pi(theta) = theta^2/(2 curv) - shift theta
        let n = 201;
        let grid: Vec<f64> = (0..n).map(|i| -3.0 + 6.0 * i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = grid.iter().map(|&q| -0.5 * curv * (q - shift) * (q - shift)).collect();
        let s = TabulatedEntropy::new(grid, values).unwrap();
        let theta_grid: Vec<f64> = (0..41).map(|i| -1.0 + i as f64 * 0.05).collect();
        let pi = TabulatedPressure::from_entropy(&s, theta_grid).unwrap();
        for (k, &th) in pi.grid().iter().enumerate() {
            let exact = th * th / (2.0 * curv) - shift * th;
            prop_assert!((pi.values()[k] - exact).abs() < 5e-4,
                "pi({th}) = {} vs {exact}", pi.values()[k]);
        }
    }

    /// The numeric conjugate is convex along theta for every concave model.
    #[test]
    fn numeric_conjugate_is_convex(center in -0.5f64..0.5) {
        let m = ParamagnetModel::new(1.0);
        let entropy = m.entropy();
        let num = NumericConjugate::new(&entropy);
        let h = 0.25;
        let left = num.eval(&[center - h]);
        let mid = num.eval(&[center]);
        let right = num.eval(&[center + h]);
        prop_assert!(0.5 * (left + right) + 1e-9 >= mid);
    }
}
