//! Monte Carlo estimators over the fluctuation field: characteristic
//! function, punctual-limit covariance bias, scaling invariance, and sample
//! moments. Every estimator reduces indexed samples through compensated
//! sums in fixed chunk order, so results are independent of thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::field::ControlField;
use crate::num::NeumaierSum;
use crate::thermo::Pressure;

use super::sampler::FieldSampler;
use super::{ScaledTestFunction, SmearFunction, TestFunction};

const CHUNK: u64 = 4096;

/// Smeared values for sample indices [0, n): parallel over fixed chunks,
/// deterministic by keyed streams.
pub fn smear_samples(
    sampler: &FieldSampler,
    f: &dyn SmearFunction,
    n: u64,
) -> Result<Vec<f64>> {
    let chunks: Vec<u64> = (0..n.div_ceil(CHUNK)).collect();
    let parts: Vec<Result<Vec<f64>>> = chunks
        .par_iter()
        .map(|&c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            (lo..hi).map(|k| sampler.smear_draw(f, k)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CharacteristicEstimate {
    pub value: Complex64,
    /// Gaussian prediction exp(-(f, pi'' f)/2) under the discrete covariance.
    pub predicted: f64,
    pub n_samples: u64,
    /// 3/sqrt(N) acceptance band.
    pub band: f64,
    pub pass: bool,
}

/// Empirical mean of exp(i xi(f)) against the Gaussian closed form.
pub fn characteristic_estimate(
    sampler: &FieldSampler,
    f: &dyn SmearFunction,
    n: u64,
) -> Result<CharacteristicEstimate> {
    if n < 1000 {
        return Err(CoreError::Precondition(format!(
            "characteristic estimate needs at least 1e3 samples, got {n}"
        )));
    }
    let values = smear_samples(sampler, f, n)?;
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    for v in &values {
        re.add(v.cos());
        im.add(v.sin());
    }
    let value = Complex64::new(re.value() / n as f64, im.value() / n as f64);
    let predicted = (-0.5 * sampler.smear_variance_exact(f)?).exp();
    let band = 3.0 / (n as f64).sqrt();
    let pass = (value - Complex64::new(predicted, 0.0)).norm() <= band;
    Ok(CharacteristicEstimate { value, predicted, n_samples: n, band, pass })
}

/// Sample mean/variance/skewness/excess kurtosis of xi(f).
#[derive(Debug, Clone)]
pub struct SampleMoments {
    pub n: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn sample_moments(values: &[f64]) -> SampleMoments {
    let n = values.len() as f64;
    let mean = values.iter().copied().collect::<NeumaierSum>().value() / n;
    let mut m2 = NeumaierSum::new();
    let mut m3 = NeumaierSum::new();
    let mut m4 = NeumaierSum::new();
    for v in values {
        let d = v - mean;
        m2.add(d * d);
        m3.add(d * d * d);
        m4.add(d * d * d * d);
    }
    let v2 = m2.value() / n;
    let v3 = m3.value() / n;
    let v4 = m4.value() / n;
    SampleMoments {
        n: values.len() as u64,
        mean,
        variance: v2,
        skewness: v3 / v2.powf(1.5),
        excess_kurtosis: v4 / (v2 * v2) - 3.0,
    }
}

#[derive(Debug, Clone)]
pub struct PunctualRow {
    pub eps: f64,
    pub sample_variance: f64,
    pub std_error: f64,
    /// Exact variance of the smeared field under the discrete covariance.
    pub smeared_truth: f64,
    /// (f, pi''(theta(x)) f) with the covariance frozen at the probe point.
    pub punctual_target: f64,
    /// |smeared_truth - punctual_target|: the deterministic theta-variation
    /// bias that the punctual limit removes.
    pub bias: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct PunctualReport {
    pub x: f64,
    pub rows: Vec<PunctualRow>,
    /// Least-squares slope of log(bias) vs log(eps).
    pub bias_slope: Option<f64>,
    /// Bias decreases monotonically as eps shrinks.
    pub bias_decreasing: bool,
}

/// Probe the field at x with shrinking test functions: the sampled variance
/// tracks the eps-smeared truth, whose distance to the punctual target
/// shrinks like eps^2 for even bumps against a smooth theta profile.
pub fn punctual_covariance_check(
    field: &ControlField,
    pressure: &dyn Pressure,
    base: &TestFunction,
    x: f64,
    eps_list: &[f64],
    n: u64,
    seed: u64,
) -> Result<PunctualReport> {
    let h = field.spacing();
    let sampler = FieldSampler::new(field, pressure, seed)?;
    let theta_x = field.theta_at(x);
    let local_hessian = pressure.hessian(&theta_x);

    // local gradient magnitude of theta_1 for the discretization allowance
    let grad = {
        let dx = 4.0 * h;
        let a = field.theta_at(x - dx);
        let b = field.theta_at(x + dx);
        (b[0] - a[0]).abs() / (2.0 * dx)
    };

    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        if eps < 10.0 * h {
            return Err(CoreError::Precondition(format!(
                "eps = {eps} below the grid resolution floor 10 h = {}",
                10.0 * h
            )));
        }
        let f = ScaledTestFunction { base: base.clone(), x0: x, eps };
        let values = smear_samples(&sampler, &f, n)?;
        let m = sample_moments(&values);
        let smeared_truth = sampler.smear_variance_exact(&f)?;
        // same grid quadrature, covariance frozen at theta(x)
        let punctual_target = {
            let mut acc = NeumaierSum::new();
            let (lo, hi) = f.support();
            for &xc in sampler.xs() {
                if xc < lo || xc > hi {
                    continue;
                }
                let fv = f.eval(xc);
                let mut quad = 0.0;
                for a in 0..f.dim() {
                    for b in 0..f.dim() {
                        quad += fv[a] * local_hessian[(a, b)] * fv[b];
                    }
                }
                acc.add(h * quad);
            }
            acc.value()
        };
        let std_error = (2.0 / n as f64).sqrt() * smeared_truth;
        let allowance = 5.0 * (eps * grad).powi(2) * punctual_target;
        let pass = (m.variance - punctual_target).abs() <= 3.0 * std_error + allowance;
        rows.push(PunctualRow {
            eps,
            sample_variance: m.variance,
            std_error,
            smeared_truth,
            punctual_target,
            bias: (smeared_truth - punctual_target).abs(),
            pass,
        });
    }

    // slope of the deterministic bias on the log-log grid
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.bias > 1e-14)
        .map(|r| (r.eps.ln(), r.bias.ln()))
        .collect();
    let bias_slope = if usable.len() >= 2 {
        let n = usable.len() as f64;
        let sx: f64 = usable.iter().map(|p| p.0).sum();
        let sy: f64 = usable.iter().map(|p| p.1).sum();
        let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() > 1e-12 {
            Some((n * sxy - sx * sy) / denom)
        } else {
            None
        }
    } else {
        None
    };

    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let bias_decreasing = sorted.windows(2).all(|w| w[1].bias <= w[0].bias + 1e-14);

    Ok(PunctualReport { x, rows, bias_slope, bias_decreasing })
}

#[derive(Debug, Clone)]
pub struct ScalingReport {
    pub estimates: Vec<(f64, Complex64)>,
    /// Max pairwise distance between characteristic estimates.
    pub max_pairwise: f64,
    pub band: f64,
    /// Grid quadrature of |f_eps|^2 per eps (exactly eps-independent in the
    /// continuum; constant within quadrature error on the grid).
    pub norms: Vec<(f64, f64)>,
    pub max_norm_spread: f64,
    pub pass: bool,
}

/// Equilibrium scaling invariance: the characteristic function is unchanged
/// under f -> f_{x0, eps} at uniform theta.
pub fn scaling_invariance_check(
    field: &ControlField,
    pressure: &dyn Pressure,
    base: &TestFunction,
    x0: f64,
    eps_list: &[f64],
    n: u64,
    seed: u64,
) -> Result<ScalingReport> {
    // uniform-field precondition
    let first = &field.thetas[0];
    if !field.thetas.iter().all(|t| t.iter().zip(first).all(|(a, b)| (a - b).abs() < 1e-12)) {
        return Err(CoreError::Precondition(
            "scaling invariance holds for uniform control fields".into(),
        ));
    }
    let sampler = FieldSampler::new(field, pressure, seed)?;
    let h = field.spacing();
    let mut estimates = Vec::with_capacity(eps_list.len());
    let mut norms = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let f = ScaledTestFunction { base: base.clone(), x0, eps };
        let est = characteristic_estimate(&sampler, &f, n)?;
        estimates.push((eps, est.value));
        // deterministic norm quadrature
        let mut acc = NeumaierSum::new();
        for &xc in sampler.xs() {
            let fv = f.eval(xc);
            acc.add(h * fv.iter().map(|v| v * v).sum::<f64>());
        }
        norms.push((eps, acc.value()));
    }
    let mut max_pairwise = 0.0f64;
    for i in 0..estimates.len() {
        for j in (i + 1)..estimates.len() {
            max_pairwise = max_pairwise.max((estimates[i].1 - estimates[j].1).norm());
        }
    }
    let band = 3.0 / (n as f64).sqrt();
    let max_norm_spread = norms
        .iter()
        .map(|(_, v)| *v)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let spread = max_norm_spread.1 - max_norm_spread.0;
    Ok(ScalingReport {
        estimates,
        max_pairwise,
        band,
        norms,
        max_norm_spread: spread,
        pass: max_pairwise <= band && spread <= 1e-4,
    })
}
