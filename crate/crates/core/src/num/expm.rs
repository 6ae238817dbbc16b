//! Dense complex matrix exponential via Pade approximation with scaling and
//! squaring (Higham's degree-13 scheme). Sizes here are tiny (<= 64), so the
//! textbook algorithm is exact to round-off and plenty fast.

use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// exp(A) for a square complex matrix.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = one_norm(a);
    // theta_13 from Higham (2005); below it the unscaled Pade is accurate.
    let theta13 = 5.371_920_351_148_152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as i32
    } else {
        0
    };
    let scale = Complex64::new(2f64.powi(-s), 0.0);
    let a = a.map(|z| z * scale);

    let id = CMat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let u_inner = &a6 * (a6.map(|z| z * b(13)) + a4.map(|z| z * b(11)) + a2.map(|z| z * b(9)))
        + a6.map(|z| z * b(7))
        + a4.map(|z| z * b(5))
        + a2.map(|z| z * b(3))
        + id.map(|z| z * b(1));
    let u = &a * u_inner;
    let v = &a6 * (a6.map(|z| z * b(12)) + a4.map(|z| z * b(10)) + a2.map(|z| z * b(8)))
        + a6.map(|z| z * b(6))
        + a4.map(|z| z * b(4))
        + a2.map(|z| z * b(2))
        + id.map(|z| z * b(0));

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Pade denominator is singular; input matrix is pathological");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_of_diagonal() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-2.0, 0.5),
        ]));
        let e = expm(&a);
        assert!((e[(0, 0)] - c(1.0, 0.0).exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - c(-2.0, 0.5).exp()).norm() < 1e-13);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exponential_of_pauli_x_rotation() {
        // exp(i t sigma_x) = cos t I + i sin t sigma_x
        let t = 0.83;
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, t), c(0.0, t), c(0.0, 0.0)]);
        let e = expm(&a);
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(0, 1)] - c(0.0, t.sin())).norm() < 1e-13);
    }

    #[test]
    fn scaling_and_squaring_kicks_in() {
        // large-norm nilpotent-ish matrix: exp([[0, 20],[0,0]]) = [[1,20],[0,1]]
        let a = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(20.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&a);
        assert!((e[(0, 1)] - c(20.0, 0.0)).norm() < 1e-11);
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }
}
