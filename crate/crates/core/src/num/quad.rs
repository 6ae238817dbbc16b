//! Adaptive Simpson quadrature with an absolute-error target.

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance `tol`.
///
/// Recursion depth is generous; smooth thermodynamic integrands converge in a
/// handful of levels. The error control uses the standard 1/15 Richardson
/// estimate for the Simpson pair.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        left + right + err / 15.0
    } else {
        let half = 0.5 * tol;
        simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_cosine_exactly_enough() {
        let v = adaptive_simpson(&|x: f64| x.cos(), 0.0, std::f64::consts::FRAC_PI_2, 1e-12);
        assert!((v - 1.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn integrates_log_sum() {
        // smooth positive integrand over a full period
        let v = adaptive_simpson(
            &|p: f64| (1.0 + (2.0 * p.cos()).exp()).ln(),
            -std::f64::consts::PI,
            std::f64::consts::PI,
            1e-11,
        );
        let finer = adaptive_simpson(
            &|p: f64| (1.0 + (2.0 * p.cos()).exp()).ln(),
            -std::f64::consts::PI,
            std::f64::consts::PI,
            1e-13,
        );
        assert!((v - finer).abs() < 1e-10);
    }
}
