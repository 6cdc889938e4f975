//! SL(2,R) and the semidirect product SL(2,R) ⋉ H3(R).
//!
//! SL(2,R) elements are row-major 2x2 matrices; the algebra coordinates
//! `(h, e, f)` stand for `h H + e E + f F` with `H = diag(1,-1)`, `E = E12`,
//! `F = E21`.
//!
//! The semidirect product is realized in 4x4 matrices. The algebra element
//! with coordinates `(h, e, f, x, y, z)` is
//!
//! ```text
//! [[0, (Kv)^T, z],
//!  [0,  A,     v],
//!  [0,  0,     0]]      A = hH + eE + fF,  v = (x, y),  K = -J/2,
//! ```
//!
//! with `J = [[0,1],[-1,0]]`. Because `sl(2) = sp(2)` preserves `J`, these
//! matrices close under the bracket, `span{X, Y, Z}` is a Heisenberg ideal
//! with `[X, Y] = Z`, and `Z` spans the center. Group elements are the 4x4
//! matrices `[[1, rho^T, z], [0, g, eta], [0, 0, 1]]` with `det g = 1` and
//! `rho = g^T K eta`.

use super::matrix::Mat;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub(crate) fn sl2_algebra_matrix<T: Real>(x: &[T]) -> Mat<T> {
    Mat::from_rows(2, vec![x[0], x[1], x[2], -x[0]])
}

pub(crate) fn sl2_algebra_coords<T: Real>(m: &Mat<T>) -> Vec<T> {
    vec![(m[(0, 0)] - m[(1, 1)]) / T::c(2.0), m[(0, 1)], m[(1, 0)]]
}

pub(crate) fn sl2_exp<T: Real>(x: &[T]) -> Vec<T> {
    sl2_algebra_matrix(x).exp().into_vec()
}

/// Closed form: `X^2 = (h^2 + ef) I`, so `exp X = c(D) I + s(D) X` with
/// hyperbolic or circular functions of `sqrt|D|`.
#[cfg(test)]
pub(crate) fn sl2_exp_closed<T: Real>(x: &[T]) -> Vec<T> {
    let disc = x[0] * x[0] + x[1] * x[2];
    let r = disc.abs().sqrt();
    let (c, s) = if r < T::c(1e-8) {
        (T::one() + disc / T::c(2.0), T::one() + disc / T::c(6.0))
    } else if disc > T::zero() {
        (r.cosh(), r.sinh() / r)
    } else {
        (r.cos(), r.sin() / r)
    };
    vec![c + s * x[0], s * x[1], s * x[2], c - s * x[0]]
}

/// Closed-form principal logarithm, defined when `tr g > -2`.
pub(crate) fn sl2_log<T: Real>(g: &[T]) -> Result<Vec<T>> {
    let half_trace = (g[0] + g[3]) / T::c(2.0);
    if half_trace <= -T::one() {
        return Err(Error::domain("SL(2,R) element has no real principal logarithm"));
    }
    let u = half_trace - T::one();
    let phi = if u.abs() < T::c(1e-12) {
        T::one() - u / T::c(3.0)
    } else if u > T::zero() {
        let s = half_trace.acosh();
        s / s.sinh()
    } else {
        let s = half_trace.acos();
        s / s.sin()
    };
    Ok(vec![(g[0] - g[3]) / T::c(2.0) * phi, g[1] * phi, g[2] * phi])
}

pub(crate) fn sl2_inv<T: Real>(g: &[T]) -> Vec<T> {
    vec![g[3], -g[1], -g[2], g[0]]
}

pub(crate) fn sl2_bracket<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    sl2_algebra_coords(&sl2_algebra_matrix(x).commutator(&sl2_algebra_matrix(y)))
}

pub(crate) fn semi_algebra_matrix<T: Real>(x: &[T]) -> Mat<T> {
    let o = T::zero();
    let half = T::c(0.5);
    Mat::from_rows(
        4,
        vec![
            o, -half * x[4], half * x[3], x[5], //
            o, x[0], x[1], x[3], //
            o, x[2], -x[0], x[4], //
            o, o, o, o,
        ],
    )
}

pub(crate) fn semi_algebra_coords<T: Real>(m: &Mat<T>) -> Vec<T> {
    vec![
        (m[(1, 1)] - m[(2, 2)]) / T::c(2.0),
        m[(1, 2)],
        m[(2, 1)],
        m[(1, 3)],
        m[(2, 3)],
        m[(0, 3)],
    ]
}

pub(crate) fn semi_exp<T: Real>(x: &[T]) -> Vec<T> {
    semi_algebra_matrix(x).exp().into_vec()
}

pub(crate) fn semi_log<T: Real>(g: &[T]) -> Result<Vec<T>> {
    let m = Mat::from_rows(4, g.to_vec());
    Ok(semi_algebra_coords(&m.log()?))
}

pub(crate) fn semi_bracket<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    semi_algebra_coords(&semi_algebra_matrix(x).commutator(&semi_algebra_matrix(y)))
}

/// The SL(2,R) block of a semidirect-product element.
pub(crate) fn semi_levi_block<T: Real>(g: &[T]) -> Vec<T> {
    vec![g[5], g[6], g[9], g[10]]
}

/// Largest violation of the semidirect-product membership equations.
pub(crate) fn semi_membership_residual<T: Real>(g: &[T]) -> T {
    let m = Mat::from_rows(4, g.to_vec());
    let mut worst = T::zero();
    let mut see = |v: T| worst = worst.max(v.abs());
    see(m[(0, 0)] - T::one());
    see(m[(3, 3)] - T::one());
    for j in 0..3 {
        see(m[(3, j)]);
    }
    for i in 1..3 {
        see(m[(i, 0)]);
    }
    let (a, b, c, d) = (m[(1, 1)], m[(1, 2)], m[(2, 1)], m[(2, 2)]);
    see(a * d - b * c - T::one());
    // rho = g^T K eta with K eta = (-eta_2/2, eta_1/2).
    let (k0, k1) = (-m[(2, 3)] / T::c(2.0), m[(1, 3)] / T::c(2.0));
    see(m[(0, 1)] - (a * k0 + c * k1));
    see(m[(0, 2)] - (b * k0 + d * k1));
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_exp_matches_series() {
        for x in [[0.3f64, -0.2, 0.5], [0.0, 0.7, -0.9], [1e-10, 2e-10, 0.0], [0.4, 0.4, 0.4]] {
            let a = sl2_exp(&x);
            let b = sl2_exp_closed(&x);
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).abs() < 1e-13, "{x:?}");
            }
            let back = sl2_log(&a).unwrap();
            for (p, q) in back.iter().zip(&x) {
                assert!((p - q).abs() < 1e-12, "{x:?}");
            }
        }
    }

    #[test]
    fn semidirect_heisenberg_bracket() {
        let x = [0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let y = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(semi_bracket(&x, &y), vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        let h = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(semi_bracket(&h, &x), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert_eq!(semi_bracket(&h, &y), vec![0.0, 0.0, 0.0, 0.0, -1.0, 0.0]);
    }

    #[test]
    fn semidirect_exp_lands_in_group() {
        let x = [0.2f64, -0.3, 0.1, 0.4, -0.5, 0.3];
        let g = semi_exp(&x);
        assert!(semi_membership_residual(&g) < 1e-14);
        let back = semi_log(&g).unwrap();
        for (p, q) in back.iter().zip(&x) {
            assert!((p - q).abs() < 1e-12);
        }
    }
}
