//! Small dense complex-matrix helpers shared by the physics modules.

use ndarray::{Array1, Array2};
use ndarray_linalg::Inverse;

use crate::{Result, C64};

pub(crate) fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub(crate) fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    (m + &dagger(m)) * C64::new(0.5, 0.0)
}

pub(crate) fn trace(m: &Array2<C64>) -> C64 {
    m.diag().sum()
}

pub(crate) fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn frobenius_distance(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    frobenius(&(a - b))
}

pub(crate) fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = a[[i, j]] * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization: `v[n*j + i] = m[i, j]`.
pub(crate) fn vec_col(m: &Array2<C64>) -> Array1<C64> {
    let (r, c) = m.dim();
    Array1::from_iter((0..c).flat_map(|j| (0..r).map(move |i| (i, j))).map(|(i, j)| m[[i, j]]))
}

pub(crate) fn unvec_col(v: &Array1<C64>, rows: usize) -> Array2<C64> {
    let cols = v.len() / rows;
    Array2::from_shape_fn((rows, cols), |(i, j)| v[rows * j + i])
}

/// Matrix exponential by scaling and squaring with a degree-13 Pade
/// approximant. Adequate for the 16x16 generators handled here.
pub(crate) fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    const THETA_13: f64 = 5.371_920_351_148_152;
    #[rustfmt::skip]
    const B: [f64; 14] = [
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0,
    ];

    let n = a.nrows();
    let one_norm = (0..n)
        .map(|j| (0..n).map(|i| a[[i, j]].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if one_norm > THETA_13 {
        (one_norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(0.5f64.powi(s), 0.0);

    let id: Array2<C64> = Array2::eye(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let u_inner = a6.dot(&(&a6 * B[13] + &a4 * B[11] + &a2 * B[9]))
        + &a6 * B[7]
        + &a4 * B[5]
        + &a2 * B[3]
        + &id * B[1];
    let u = scaled.dot(&u_inner);
    let v = a6.dot(&(&a6 * B[12] + &a4 * B[10] + &a2 * B[8]))
        + &a6 * B[6]
        + &a4 * B[4]
        + &a2 * B[2]
        + &id * B[0];

    let denom = (&v - &u).inv()?;
    let mut result = denom.dot(&(&v + &u));
    for _ in 0..s {
        result = result.dot(&result);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vectorization_round_trip() {
        let m = array![[c(1.0, 2.0), c(3.0, 0.0)], [c(0.0, -1.0), c(4.0, 4.0)]];
        let v = vec_col(&m);
        assert_eq!(v[0], m[[0, 0]]);
        assert_eq!(v[1], m[[1, 0]]);
        assert_eq!(v[2], m[[0, 1]]);
        assert_eq!(unvec_col(&v, 2), m);
    }

    #[test]
    fn kron_mixed_product() {
        // vec(A X B) = (B^T kron A) vec(X)
        let a = array![[c(1.0, 1.0), c(2.0, 0.0)], [c(0.0, 3.0), c(1.0, -1.0)]];
        let b = array![[c(0.5, 0.0), c(0.0, 2.0)], [c(1.0, 0.0), c(2.0, 2.0)]];
        let x = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(-1.0, 0.0), c(0.0, -2.0)]];
        let lhs = vec_col(&a.dot(&x).dot(&b));
        let rhs = kron(&b.t().to_owned(), &a).dot(&vec_col(&x));
        assert_abs_diff_eq!(frobenius(&unvec_col(&(&lhs - &rhs), 2)), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z: Array2<C64> = Array2::zeros((4, 4));
        let e = expm(&z).unwrap();
        assert_abs_diff_eq!(frobenius_distance(&e, &Array2::eye(4)), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn expm_of_diagonal() {
        let d = array![
            [c(0.3, 1.2), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-2.0, -0.7)]
        ];
        let e = expm(&d).unwrap();
        assert_abs_diff_eq!((e[[0, 0]] - c(0.3, 1.2).exp()).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((e[[1, 1]] - c(-2.0, -0.7).exp()).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[[0, 1]].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expm_group_property() {
        // exp(A) exp(A) = exp(2A) for one fixed non-normal A
        let a = array![
            [c(0.0, -2.0), c(1.5, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-1.0, 0.0), c(2.0, 1.0)],
            [c(0.3, 0.0), c(0.0, 0.0), c(0.0, 2.0)]
        ];
        let e1 = expm(&a).unwrap();
        let e2 = expm(&(&a * 2.0)).unwrap();
        assert_abs_diff_eq!(frobenius_distance(&e1.dot(&e1), &e2), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn expm_large_norm_scaling_path() {
        // norm far above theta_13 exercises the squaring loop
        let a = array![[c(0.0, 40.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-35.0, 0.0)]];
        let e = expm(&a).unwrap();
        assert_abs_diff_eq!((e[[0, 0]] - c(0.0, 40.0).exp()).norm(), 0.0, epsilon = 1e-11);
        assert_abs_diff_eq!((e[[1, 1]] - (-35.0f64).exp()).norm(), 1e-30, epsilon = 1e-15);
    }
}
