//! Legendre conjugation between entropy density and reduced pressure.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::num::{fd::DEFAULT_FD_STEP, golden_max, newton_min_convex};

use super::types::{ControlVariable, Domain, Entropy, Pressure, Representation, StateDensity};

/// Argument tolerance of the golden-section refinement in the numeric sup.
const SUP_ARG_TOL: f64 = 1e-10;

/// Relative slope mismatch above which pi is declared non-differentiable.
pub const KINK_TOL: f64 = 1e-6;

/// pi(theta) = sup_q (s(q) - theta.q) together with the maximizer q*.
///
/// The supremum is located by a coarse scan followed by golden-section
/// refinement, which is exact enough for concave `s` (the scan brackets the
/// global maximum). Only scalar models carry a numeric sup; multi-component
/// models supply their pressure in closed form or by quadrature.
pub fn legendre_transform(
    s: &dyn Entropy,
    theta: &ControlVariable,
) -> Result<(f64, StateDensity)> {
    if theta.dim() != s.dim() {
        return Err(CoreError::Input(format!(
            "theta dimension {} does not match entropy dimension {}",
            theta.dim(),
            s.dim()
        )));
    }
    if s.dim() != 1 {
        return Err(CoreError::Input(
            "numeric Legendre sup implemented for scalar (n = 1) entropies only; \
             multi-component models provide closed-form or quadrature pressures"
                .into(),
        ));
    }
    let dom = s.domain();
    let (lo, hi) = (dom.lower[0], dom.upper[0]);
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(CoreError::Input(format!(
            "numeric sup needs a bounded domain, got [{lo}, {hi}]"
        )));
    }
    let th = theta.0[0];
    let g = |q: f64| s.eval(&[q]) - th * q;
    let (mut q_star, mut pi) = golden_max(&g, lo, hi, 1e-8);
    // Value comparisons cannot place the argmax better than sqrt(eps);
    // polish with safeguarded Newton steps on the difference quotient,
    // accepting only moves that do not lower the objective. Tabulated
    // entropies with kinked maxima simply keep the golden-section point.
    let mut x = q_star;
    for _ in 0..12 {
        let d = 1e-6 * (1.0 + x.abs());
        if x - d <= lo || x + d >= hi {
            break;
        }
        let gp = g(x + d);
        let gm = g(x - d);
        let g0 = g(x);
        let d1 = (gp - gm) / (2.0 * d);
        let d2 = (gp - 2.0 * g0 + gm) / (d * d);
        if d2 >= -1e-12 || !d2.is_finite() {
            break;
        }
        let next = (x - d1 / d2).clamp(lo, hi);
        if (next - x).abs() < SUP_ARG_TOL {
            x = next;
            break;
        }
        x = next;
    }
    let polished = g(x);
    if polished >= pi - 1e-12 * (1.0 + pi.abs()) {
        q_star = x;
        pi = pi.max(polished);
    }
    if !pi.is_finite() {
        return Err(CoreError::Domain(format!(
            "sup of s(q) - theta.q not finite at theta = {th}"
        )));
    }
    Ok((pi, StateDensity::scalar(q_star)))
}

/// Pure-phase equilibrium density q = -pi'(theta).
///
/// Errors with `NonDifferentiable` when the one-sided slopes of pi disagree
/// (coexistence); the caller should then use the tangent set.
pub fn q_of_theta(pi: &dyn Pressure, theta: &ControlVariable) -> Result<StateDensity> {
    if theta.dim() != pi.dim() {
        return Err(CoreError::Input("theta dimension mismatch".into()));
    }
    let th = theta.as_slice();
    if pi.dim() == 1 {
        // Detect a kink via one-sided difference quotients before trusting
        // the central derivative.
        let h = 1e-5 * (1.0 + th[0].abs());
        let p0 = pi.eval(th);
        let pl = pi.eval(&[th[0] - h]);
        let pr = pi.eval(&[th[0] + h]);
        let left = (p0 - pl) / h;
        let right = (pr - p0) / h;
        if (right - left).abs() > KINK_TOL * (1.0 + left.abs().max(right.abs())) * 20.0 {
            return Err(CoreError::NonDifferentiable {
                theta: th.to_vec(),
                left,
                right,
            });
        }
    }
    let g = pi.grad(th);
    Ok(StateDensity(g.iter().map(|v| -v).collect()))
}

/// Local control variable theta = s'(q).
///
/// Errors when q sits on the domain boundary (the gradient diverges there)
/// or when the model's control space excludes the computed theta.
pub fn theta_of_q(s: &dyn Entropy, q: &StateDensity) -> Result<ControlVariable> {
    if q.dim() != s.dim() {
        return Err(CoreError::Input("q dimension mismatch".into()));
    }
    let dom = s.domain();
    if !dom.contains_interior(q.as_slice(), 1e-9) {
        return Err(CoreError::Domain(format!(
            "q = {:?} is not interior to the entropy domain; s'(q) diverges at the boundary",
            q.as_slice()
        )));
    }
    let g = s.grad(q.as_slice());
    if !g.iter().all(|v| v.is_finite()) {
        return Err(CoreError::Domain(format!("s'(q) not finite at q = {:?}", q.as_slice())));
    }
    Ok(ControlVariable(g))
}

/// Max-norm residual of pi''(theta) * s''(q(theta)) + I.
///
/// Both Hessians come from the model (closed form where available, central
/// differences otherwise). Errors when s'' is singular, which signals a
/// coexistence or critical point where the pairing breaks down.
pub fn hessian_pair_check(
    s: &dyn Entropy,
    pi: &dyn Pressure,
    theta: &ControlVariable,
) -> Result<f64> {
    let q = q_of_theta(pi, theta)?;
    let spp = s.hessian(q.as_slice());
    let ppp = pi.hessian(theta.as_slice());
    let n = spp.nrows();
    if spp.determinant().abs() < 1e-12 {
        return Err(CoreError::Domain(
            "s''(q) is singular: coexistence or critical point, the Hessian pairing does not apply"
                .into(),
        ));
    }
    let residual = &ppp * &spp + DMatrix::<f64>::identity(n, n);
    Ok(residual.iter().fold(0.0f64, |a, v| a.max(v.abs())))
}

/// p = pi * T.
pub fn pressure_from_pi(pi_value: f64, temperature: f64) -> Result<f64> {
    if temperature <= 0.0 {
        return Err(CoreError::Input(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    Ok(pi_value * temperature)
}

/// Pressure obtained by numerically conjugating an entropy on demand.
pub struct NumericConjugate<'a> {
    entropy: &'a dyn Entropy,
    control_space: Domain,
}

impl<'a> NumericConjugate<'a> {
    pub fn new(entropy: &'a dyn Entropy) -> Self {
        let n = entropy.dim();
        NumericConjugate { entropy, control_space: Domain::unbounded(n) }
    }
}

impl Pressure for NumericConjugate<'_> {
    fn dim(&self) -> usize {
        self.entropy.dim()
    }

    fn control_space(&self) -> Domain {
        self.control_space.clone()
    }

    fn eval(&self, theta: &[f64]) -> f64 {
        legendre_transform(self.entropy, &ControlVariable(theta.to_vec()))
            .map(|(pi, _)| pi)
            .unwrap_or(f64::NAN)
    }

    fn representation(&self) -> Representation {
        Representation::NumericConjugate
    }
}

/// Recover the entropy at a density from the pressure alone:
/// s(q) = inf_theta (pi(theta) + theta.q), solved by damped Newton on the
/// smooth convex objective. Returns `(s(q), theta*)`; theta* = s'(q) by the
/// envelope theorem, so this map also provides an independent route to
/// s' and (by differencing theta*) to s''.
pub fn entropy_from_pressure(
    pi: &dyn Pressure,
    q: &StateDensity,
    start: &ControlVariable,
) -> Result<(f64, ControlVariable)> {
    let n = pi.dim();
    if q.dim() != n || start.dim() != n {
        return Err(CoreError::Input("dimension mismatch in dual entropy".into()));
    }
    let qv = q.as_slice().to_vec();
    let grad = |th: &DVector<f64>| {
        let g = pi.grad(th.as_slice());
        DVector::from_iterator(n, g.iter().zip(&qv).map(|(gi, qi)| gi + qi))
    };
    let hess = |th: &DVector<f64>| pi.hessian(th.as_slice());
    let theta = newton_min_convex(
        &grad,
        &hess,
        DVector::from_column_slice(start.as_slice()),
        1e-12,
        80,
    )?;
    let th = theta.as_slice().to_vec();
    let s = pi.eval(&th) + th.iter().zip(&qv).map(|(a, b)| a * b).sum::<f64>();
    Ok((s, ControlVariable(th)))
}

/// s''(q) evaluated through the dual control map theta*(q) of
/// `entropy_from_pressure`, by central-differencing theta* in q. Gives an
/// independent second-derivative route for models that only expose pi.
/// Columns are Richardson-extrapolated (steps h and h/2) to push the
/// truncation error below the quadrature noise floor.
pub fn dual_entropy_hessian(
    pi: &dyn Pressure,
    q: &StateDensity,
    start: &ControlVariable,
) -> Result<DMatrix<f64>> {
    let n = pi.dim();
    let qv = q.as_slice();
    let column = |j: usize, step: f64| -> Result<Vec<f64>> {
        let mut qp = qv.to_vec();
        qp[j] = qv[j] + step;
        let (_, tp) = entropy_from_pressure(pi, &StateDensity(qp.clone()), start)?;
        qp[j] = qv[j] - step;
        let (_, tm) = entropy_from_pressure(pi, &StateDensity(qp), start)?;
        Ok((0..n).map(|i| (tp.0[i] - tm.0[i]) / (2.0 * step)).collect())
    };
    let mut h = DMatrix::zeros(n, n);
    for j in 0..n {
        let step = DEFAULT_FD_STEP * (1.0 + qv[j].abs());
        let coarse = column(j, step)?;
        let fine = column(j, 0.5 * step)?;
        for i in 0..n {
            h[(i, j)] = (4.0 * fine[i] - coarse[i]) / 3.0;
        }
    }
    // Symmetrize; the exact object is a symmetric Hessian.
    let ht = h.transpose();
    Ok((h + ht) * 0.5)
}
