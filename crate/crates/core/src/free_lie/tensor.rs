//! Truncated free associative algebra `K<x1..xs> / (degree > order)`.
//!
//! Used to expand Lyndon brackets into noncommutative polynomials, to compute
//! structure constants, and to evaluate group words as products of
//! exponentials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::Field;

/// Dense truncated series: `coeffs[k][idx]` is the coefficient of the word of
/// length `k` whose base-`s` digits (most significant first) are `idx`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSeries<K> {
    s: usize,
    order: usize,
    coeffs: Vec<Vec<K>>,
}

pub(crate) fn word_index(s: usize, letters: &[u8]) -> usize {
    letters.iter().fold(0, |acc, &l| acc * s + l as usize)
}

pub(crate) fn word_letters(s: usize, len: usize, mut idx: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % s) as u8;
        idx /= s;
    }
    out
}

impl<K: Field> TensorSeries<K> {
    pub fn zero(s: usize, order: usize) -> Self {
        let coeffs = (0..=order).map(|k| vec![K::zero(); s.pow(k as u32)]).collect();
        TensorSeries { s, order, coeffs }
    }

    pub fn one(s: usize, order: usize) -> Self {
        let mut t = Self::zero(s, order);
        t.coeffs[0][0] = K::one();
        t
    }

    pub fn letter(s: usize, order: usize, i: u8) -> Self {
        let mut t = Self::zero(s, order);
        if order >= 1 {
            t.coeffs[1][i as usize] = K::one();
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree_part(&self, k: usize) -> &[K] {
        &self.coeffs[k]
    }

    pub(crate) fn degree_part_mut(&mut self, k: usize) -> &mut [K] {
        &mut self.coeffs[k]
    }

    pub fn coeff(&self, letters: &[u8]) -> &K {
        &self.coeffs[letters.len()][word_index(self.s, letters)]
    }

    pub fn add_assign(&mut self, other: &Self, factor: &K) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (x, y) in a.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x = x.clone() + factor.clone() * y.clone();
                }
            }
        }
    }

    pub fn scale(&self, factor: &K) -> Self {
        let mut out = self.clone();
        for part in &mut out.coeffs {
            for x in part.iter_mut() {
                *x = x.clone() * factor.clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.s, self.order);
        for i in 0..=self.order {
            for j in 0..=(self.order - i) {
                let stride = self.s.pow(j as u32);
                let target = &mut out.coeffs[i + j];
                for (ai, a) in self.coeffs[i].iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (bj, b) in other.coeffs[j].iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let slot = &mut target[ai * stride + bj];
                        *slot = slot.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &Self) -> Self {
        let mut out = self.mul(other);
        out.add_assign(&other.mul(self), &-K::one());
        out
    }

    pub fn constant_term(&self) -> &K {
        &self.coeffs[0][0]
    }

    /// `exp(self)`; requires a vanishing constant term.
    pub fn exp(&self) -> Self {
        debug_assert!(self.constant_term().is_zero());
        let mut result = Self::one(self.s, self.order);
        let mut power = Self::one(self.s, self.order);
        for n in 1..=self.order {
            power = power.mul(self);
            result.add_assign(&power, &K::from_ratio(1, factorial(n)));
        }
        result
    }

    /// `log(self)`; requires constant term one.
    pub fn log(&self) -> Self {
        debug_assert!(self.constant_term().is_one());
        let mut nilpotent = self.clone();
        nilpotent.coeffs[0][0] = K::zero();
        let mut result = Self::zero(self.s, self.order);
        let mut power = Self::one(self.s, self.order);
        for n in 1..=self.order {
            power = power.mul(&nilpotent);
            let sign = if n % 2 == 1 { 1 } else { -1 };
            result.add_assign(&power, &K::from_ratio(sign, n as i64));
        }
        result
    }
}

pub(crate) fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Products of exponentials of integer multiples of generators, kept with
/// integer coefficients: the stored value for a word of length `k` is `k!`
/// times its true coefficient, which is always an integer for such products.
pub(crate) struct ScaledIntegerSeries {
    s: usize,
    order: usize,
    coeffs: Vec<Vec<BigInt>>,
    binomials: Vec<Vec<BigInt>>,
}

impl ScaledIntegerSeries {
    pub fn one(s: usize, order: usize) -> Self {
        let mut coeffs: Vec<Vec<BigInt>> =
            (0..=order).map(|k| vec![BigInt::zero(); s.pow(k as u32)]).collect();
        coeffs[0][0] = BigInt::one();
        let mut binomials = vec![vec![BigInt::one()]];
        for n in 1..=order {
            let prev = &binomials[n - 1];
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &prev[k - 1] + &prev[k];
            }
            binomials.push(row);
        }
        ScaledIntegerSeries { s, order, coeffs, binomials }
    }

    /// Right-multiplies by `exp(power * x_letter)`.
    pub fn mul_exp_letter(&mut self, letter: u8, power: i64) {
        if power == 0 {
            return;
        }
        let a = BigInt::from(power);
        let a_pows: Vec<BigInt> = (0..=self.order)
            .scan(BigInt::one(), |acc, i| {
                let cur = acc.clone();
                if i < self.order {
                    *acc = &*acc * &a;
                }
                Some(cur)
            })
            .collect();
        let s = self.s;
        // Word v of length n ending in t copies of `letter` receives
        // binom(n, m) a^m D[prefix of length n - m] for m = 1..=t.
        for n in (1..=self.order).rev() {
            let (lower, upper) = self.coeffs.split_at_mut(n);
            let target = &mut upper[0];
            for (v, slot) in target.iter_mut().enumerate() {
                let mut prefix = v;
                let mut m = 0;
                let mut add = BigInt::zero();
                while m < n && prefix % s == letter as usize {
                    prefix /= s;
                    m += 1;
                    let src = &lower[n - m][prefix];
                    if !src.is_zero() {
                        add += &self.binomials[n][m] * &a_pows[m] * src;
                    }
                }
                if !add.is_zero() {
                    *slot += add;
                }
            }
        }
    }

    pub fn into_series<K: Field>(self) -> Option<TensorSeries<K>> {
        let mut out = TensorSeries::zero(self.s, self.order);
        for (k, part) in self.coeffs.iter().enumerate() {
            let den = BigInt::from(factorial(k));
            for (idx, c) in part.iter().enumerate() {
                if !c.is_zero() {
                    out.coeffs[k][idx] = K::from_big_ratio(c, &den)?;
                }
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn exp_log_round_trip() {
        let x = TensorSeries::<Q>::letter(2, 5, 0);
        let y = TensorSeries::<Q>::letter(2, 5, 1);
        let mut z = x.clone();
        z.add_assign(&y.commutator(&x), &q(1, 3));
        let back = z.exp().log();
        assert_eq!(back, z);
    }

    #[test]
    fn exp_of_letter_has_factorial_coefficients() {
        let x = TensorSeries::<Q>::letter(1, 4, 0);
        let e = x.exp();
        assert_eq!(*e.coeff(&[0, 0, 0]), q(1, 6));
        assert_eq!(*e.coeff(&[0, 0, 0, 0]), q(1, 24));
    }

    #[test]
    fn scaled_integer_product_matches_rational_product() {
        let order = 4;
        let letters = [(0u8, 2i64), (1, -1), (0, 3), (1, 2), (0, -1)];
        let mut fast = ScaledIntegerSeries::one(2, order);
        let mut slow = TensorSeries::<Q>::one(2, order);
        for &(l, p) in &letters {
            fast.mul_exp_letter(l, p);
            let e = TensorSeries::<Q>::letter(2, order, l).scale(&q(p, 1)).exp();
            slow = slow.mul(&e);
        }
        assert_eq!(fast.into_series::<Q>().unwrap(), slow);
    }
}
