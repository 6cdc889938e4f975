//! SU(2) as unit quaternions `(w, x, y, z)`.
//!
//! The algebra basis is `e_k = -i sigma_k`, which multiply like the
//! quaternion units, so `[e1, e2] = 2 e3` and `Ad` acts by rotations.

use super::matrix::Mat;
use crate::scalar::Real;

pub(crate) fn mul<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    vec![
        p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3],
        p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2],
        p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1],
        p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0],
    ]
}

pub(crate) fn inv<T: Real>(q: &[T]) -> Vec<T> {
    vec![q[0], -q[1], -q[2], -q[3]]
}

/// `exp(v) = cos|v| + sin|v| v/|v|`.
pub(crate) fn exp<T: Real>(v: &[T]) -> Vec<T> {
    let theta = norm3(v);
    let sinc = if theta < T::c(1e-8) { T::one() - theta * theta / T::c(6.0) } else { theta.sin() / theta };
    vec![theta.cos(), v[0] * sinc, v[1] * sinc, v[2] * sinc]
}

/// Principal logarithm; the angle lies in `[0, pi]`.
pub(crate) fn log<T: Real>(q: &[T]) -> Vec<T> {
    let u = norm3(&q[1..]);
    let theta = u.atan2(q[0]);
    let factor = if u < T::c(1e-8) { T::one() / q[0] } else { theta / u };
    vec![q[1] * factor, q[2] * factor, q[3] * factor]
}

pub(crate) fn bracket<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let two = T::c(2.0);
    vec![
        two * (x[1] * y[2] - x[2] * y[1]),
        two * (x[2] * y[0] - x[0] * y[2]),
        two * (x[0] * y[1] - x[1] * y[0]),
    ]
}

/// Rotation matrix of `v -> q v q^-1`.
pub(crate) fn adjoint<T: Real>(q: &[T]) -> Mat<T> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    let (one, two) = (T::one(), T::c(2.0));
    Mat::from_rows(
        3,
        vec![
            one - two * (y * y + z * z),
            two * (x * y - w * z),
            two * (x * z + w * y),
            two * (x * y + w * z),
            one - two * (x * x + z * z),
            two * (y * z - w * x),
            two * (x * z - w * y),
            two * (y * z + w * x),
            one - two * (x * x + y * y),
        ],
    )
}

fn norm3<T: Real>(v: &[T]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
