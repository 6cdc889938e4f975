//! Small dense square matrices with the exponential and logarithm needed by
//! the matrix backends.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Row-major entries.
    pub fn from_rows(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "expected {n}x{n} entries");
        Mat { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        Mat { n: self.n, data: self.data.iter().map(|&x| x * c).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        Mat { n: self.n, data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect() }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs().partial_cmp(&a[(j, col)].abs()).expect("finite"))
                .expect("nonempty");
            if a[(pivot, col)].abs() < T::c(1e-300) {
                return Err(Error::domain("singular matrix"));
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)];
            for j in 0..n {
                a[(col, j)] = a[(col, j)] / p;
                inv[(col, j)] = inv[(col, j)] / p;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.n {
            self.data.swap(i * self.n + k, j * self.n + k);
        }
    }

    /// Scaling and squaring with a Taylor polynomial on the scaled matrix.
    pub fn exp(&self) -> Self {
        let norm = self.norm();
        let mut squarings = 0;
        let mut scaled_norm = norm;
        while scaled_norm > T::c(0.5) {
            scaled_norm = scaled_norm / T::c(2.0);
            squarings += 1;
        }
        let a = self.scale(T::c(0.5).powi(squarings));
        let mut result = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for k in 1..=24 {
            term = term.mul(&a).scale(T::one() / T::c(k as f64));
            result = result.add(&term);
            if term.norm() <= T::epsilon() * T::c(1e-2) {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }

    /// Principal square root by the Denman–Beavers iteration.
    pub fn sqrt(&self) -> Result<Self> {
        let mut y = self.clone();
        let mut z = Self::identity(self.n);
        for _ in 0..60 {
            let yi = y.inverse()?;
            let zi = z.inverse()?;
            let half = T::c(0.5);
            let y_next = y.add(&zi).scale(half);
            let z_next = z.add(&yi).scale(half);
            let delta = y_next.sub(&y).norm();
            y = y_next;
            z = z_next;
            if delta <= T::epsilon() * T::c(4.0) * (T::one() + y.norm()) {
                return Ok(y);
            }
        }
        Err(Error::domain("matrix square root did not converge"))
    }

    /// Principal logarithm by inverse scaling and squaring: take square
    /// roots until the matrix is close to the identity, sum the Mercator
    /// series, then rescale.
    pub fn log(&self) -> Result<Self> {
        let id = Self::identity(self.n);
        let mut m = self.clone();
        let mut roots = 0;
        while m.sub(&id).norm() > T::c(0.1) {
            if roots >= 40 {
                return Err(Error::domain("matrix logarithm: no convergent square-root ladder"));
            }
            m = m.sqrt()?;
            roots += 1;
        }
        let x = m.sub(&id);
        let mut result = Self::zeros(self.n);
        let mut power = id;
        for k in 1..=40 {
            power = power.mul(&x);
            let sign = if k % 2 == 1 { T::one() } else { -T::one() };
            let term = power.scale(sign / T::c(k as f64));
            result = result.add(&term);
            if term.norm() <= T::epsilon() * T::c(1e-2) {
                break;
            }
        }
        Ok(result.scale(T::c(2.0).powi(roots)))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_log_round_trip() {
        let x = Mat::from_rows(3, vec![0.1, -0.4, 0.2, 0.3, 0.05, -0.2, 0.0, 0.25, -0.15]);
        let back = x.exp().log().unwrap();
        assert!(back.sub(&x).norm() < 1e-13);
    }

    #[test]
    fn exp_of_rotation_generator() {
        let t: f64 = 2.5;
        let x = Mat::from_rows(2, vec![0.0, -t, t, 0.0]);
        let e = x.exp();
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn inverse_and_sqrt() {
        let a = Mat::from_rows(2, vec![4.0, 1.0, 0.0, 9.0]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).sub(&Mat::identity(2)).norm() < 1e-15);
        let r = a.sqrt().unwrap();
        assert!(r.mul(&r).sub(&a).norm() < 1e-12);
        assert!(Mat::<f64>::zeros(2).inverse().is_err());
    }
}
