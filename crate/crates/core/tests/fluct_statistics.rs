//! Smeared-field statistics against closed forms, plus linearity properties
//! of the smearing map.

use lte_core::field::ControlField;
use lte_core::fluct::{
    characteristic_estimate, sample_moments, scaling_invariance_check, smear, smear_samples,
    FieldSampler, ScaledTestFunction, SmearFunction, TestFunction, BUMP_L2_SQ,
};
use lte_core::models::ParamagnetModel;
use proptest::prelude::*;

const SECH2_1: f64 = 0.419_974_341_614_026_14;

fn sampler(cells: usize, seed: u64) -> FieldSampler {
    let field = ControlField::uniform(vec![1.0], cells);
    FieldSampler::new(&field, &ParamagnetModel::new(1.0).pressure(), seed).unwrap()
}

#[test]
fn smeared_variance_matches_closed_form() {
    // Var(xi(f)) = sech^2(1) * 256/315 for the eps-normalized unit bump
    let s = sampler(400, 1234);
    let f = ScaledTestFunction { base: TestFunction::unit_bump(0.0, 1.0, 1), x0: 0.5, eps: 0.25 };
    let n = 100_000u64;
    let values = smear_samples(&s, &f, n).unwrap();
    let m = sample_moments(&values);
    let expect = SECH2_1 * BUMP_L2_SQ;
    let se = (2.0 / n as f64).sqrt() * expect;
    assert!(
        (m.variance - expect).abs() < 3.0 * se,
        "variance {} vs {expect} (3se = {})",
        m.variance,
        3.0 * se
    );
    // skewness and kurtosis within the Gaussian bands
    let band = 5.0 / (n as f64).sqrt();
    assert!(m.skewness.abs() < band, "skewness {}", m.skewness);
    assert!(m.excess_kurtosis.abs() < band, "kurtosis {}", m.excess_kurtosis);
}

#[test]
fn characteristic_function_hits_gaussian_closed_form() {
    let s = sampler(400, 77);
    let f = ScaledTestFunction { base: TestFunction::unit_bump(0.0, 1.0, 1), x0: 0.5, eps: 0.25 };
    let est = characteristic_estimate(&s, &f, 100_000).unwrap();
    // exp(-sech^2(1) * (256/315) / 2) = 0.84311...
    assert!((est.predicted - 0.843_111_35).abs() < 2e-3, "predicted {}", est.predicted);
    assert!(est.pass, "estimate {} band {}", est.value, est.band);
}

#[test]
fn scaling_invariance_of_the_characteristic_function() {
    let field = ControlField::uniform(vec![1.0], 500);
    let m = ParamagnetModel::new(1.0);
    let rep = scaling_invariance_check(
        &field,
        &m.pressure(),
        &TestFunction::unit_bump(0.0, 1.0, 1),
        0.5,
        &[0.4, 0.2, 0.1],
        50_000,
        4242,
    )
    .unwrap();
    assert!(rep.pass, "pairwise {} norm spread {}", rep.max_pairwise, rep.max_norm_spread);
    assert!(rep.max_norm_spread < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Smearing is linear: xi(a f + b g) = a xi(f) + b xi(g) per sample.
    #[test]
    fn smear_is_linear_per_sample(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        idx in 0u64..32,
    ) {
        let s = sampler(150, 99);
        let sample = s.sample(idx);
        let f = TestFunction { center: 0.45, radius: 0.25, weights: vec![a] };
        let g = TestFunction { center: 0.6, radius: 0.3, weights: vec![b] };
        // combined function evaluated pointwise
        struct Sum(TestFunction, TestFunction);
        impl SmearFunction for Sum {
            fn dim(&self) -> usize { 1 }
            fn eval(&self, x: f64) -> Vec<f64> {
                vec![self.0.eval(x)[0] + self.1.eval(x)[0]]
            }
            fn support(&self) -> (f64, f64) {
                let (a0, a1) = self.0.support();
                let (b0, b1) = self.1.support();
                (a0.min(b0), a1.max(b1))
            }
        }
        let lhs = smear(&sample, &Sum(f.clone(), g.clone()));
        let rhs = smear(&sample, &f) + smear(&sample, &g);
        prop_assert!((lhs - rhs).abs() < 1e-10, "{lhs} vs {rhs}");
    }

    /// Identical seeds reproduce identical samples; different seeds differ.
    #[test]
    fn seed_determinism(seed in 0u64..1000, idx in 0u64..64) {
        let s1 = sampler(60, seed);
        let s2 = sampler(60, seed);
        let a = s1.sample(idx);
        let b = s2.sample(idx);
        prop_assert_eq!(&a.xi, &b.xi);
        let s3 = sampler(60, seed + 1);
        let c = s3.sample(idx);
        prop_assert_ne!(&a.xi, &c.xi);
    }
}
