//! The Heisenberg group of unipotent upper-triangular 3x3 matrices.
//!
//! Group coordinates `(a, b, c)` stand for `[[1, a, c], [0, 1, b], [0, 0, 1]]`;
//! algebra coordinates `(x, y, z)` for `x X + y Y + z Z` with `X = E12`,
//! `Y = E23`, `Z = E13`, so `[X, Y] = Z`. Nilpotency makes exp and log
//! finite polynomials.

use super::matrix::Mat;
use crate::scalar::Real;

pub(crate) fn mul<T: Real>(g: &[T], h: &[T]) -> Vec<T> {
    vec![g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]]
}

pub(crate) fn inv<T: Real>(g: &[T]) -> Vec<T> {
    vec![-g[0], -g[1], g[0] * g[1] - g[2]]
}

pub(crate) fn exp<T: Real>(x: &[T]) -> Vec<T> {
    vec![x[0], x[1], x[2] + x[0] * x[1] / T::c(2.0)]
}

pub(crate) fn log<T: Real>(g: &[T]) -> Vec<T> {
    vec![g[0], g[1], g[2] - g[0] * g[1] / T::c(2.0)]
}

pub(crate) fn bracket<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    vec![T::zero(), T::zero(), x[0] * y[1] - x[1] * y[0]]
}

/// `Ad(g) X = X - b Z`, `Ad(g) Y = Y + a Z`, `Ad(g) Z = Z`.
pub(crate) fn adjoint<T: Real>(g: &[T]) -> Mat<T> {
    let (o, l) = (T::zero(), T::one());
    Mat::from_rows(3, vec![l, o, o, o, l, o, -g[1], g[0], l])
}

#[cfg(test)]
pub(crate) fn matrix<T: Real>(g: &[T]) -> Mat<T> {
    let (o, l) = (T::zero(), T::one());
    Mat::from_rows(3, vec![l, g[0], g[2], o, l, g[1], o, o, l])
}
