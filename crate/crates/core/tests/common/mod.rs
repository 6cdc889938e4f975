//! Reference implementations used as oracles by the integration tests.
//! They share no code paths with the library beyond its public types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lie_expand::group_backends::{Backend, Mat};
use lie_expand::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Noncommutative polynomial: word (zero-based letters) to coefficient.
pub type Poly = BTreeMap<Vec<u8>, Rational>;

fn add_into(p: &mut Poly, w: Vec<u8>, c: Rational) {
    let e = p.entry(w.clone()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&w);
    }
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (u, x) in a {
        for (v, y) in b {
            let mut w = u.clone();
            w.extend(v);
            add_into(&mut out, w, x * y);
        }
    }
    out
}

fn commutator(a: &Poly, b: &Poly) -> Poly {
    let mut out = mul(a, b);
    for (w, c) in mul(b, a) {
        add_into(&mut out, w, -c);
    }
    out
}

fn letter(i: u8) -> Poly {
    Poly::from([(vec![i], Rational::one())])
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Right-nested bracket `[l1, [l2, [..., lm]]]` expanded as a polynomial.
fn nested(letters: &[u8]) -> Poly {
    let (last, rest) = letters.split_last().expect("nonempty");
    rest.iter().rev().fold(letter(*last), |acc, &l| commutator(&letter(l), &acc))
}

/// All sequences of pairs `(r_i, s_i)` with `r_i + s_i >= 1` and total at
/// most `order`.
fn pair_sequences(order: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    while let Some(seq) = stack.pop() {
        let used: usize = seq.iter().map(|(r, s)| r + s).sum();
        if !seq.is_empty() {
            out.push(seq.clone());
        }
        for r in 0..=order - used {
            for s in 0..=order - used - r {
                if r + s >= 1 {
                    let mut next = seq.clone();
                    next.push((r, s));
                    stack.push(next);
                }
            }
        }
    }
    out
}

/// Dynkin's series for `log(exp x exp y)` up to total degree `order`,
/// expanded in the free associative algebra on `x = 0`, `y = 1`.
pub fn dynkin_bch(order: usize) -> Poly {
    let mut out = Poly::new();
    for seq in pair_sequences(order) {
        let n = seq.len();
        let total: usize = seq.iter().map(|(r, s)| r + s).sum();
        let mut letters = Vec::new();
        let mut denom = BigInt::from(n) * BigInt::from(total);
        for &(r, s) in &seq {
            letters.extend(std::iter::repeat(0u8).take(r));
            letters.extend(std::iter::repeat(1u8).take(s));
            denom *= factorial(r) * factorial(s);
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        let coeff = Rational::new(BigInt::from(sign), denom);
        for (w, c) in nested(&letters) {
            add_into(&mut out, w, c * &coeff);
        }
    }
    out
}

/// Every word over `s` letters of length `1..=order`.
pub fn all_words(s: u8, order: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..order {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..s).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// How the group element `a` acts on a lattice vector in the generated-set
/// oracle.
pub enum OracleAction {
    /// Multiplication by the real number `a` (for `Abelian(1)`).
    Scalar,
    /// Precomputed matrices, one per element of `A`.
    Matrices(Vec<Mat<f64>>),
}

fn snap(v: &[f64], delta: f64) -> Vec<i64> {
    v.iter().map(|x| (x / delta).round() as i64).collect()
}

fn act(action: &OracleAction, a_index: usize, a: &[i64], x: &[i64], delta: f64) -> Vec<i64> {
    match action {
        OracleAction::Scalar => {
            let t = a[0] as f64 * delta;
            let image: Vec<f64> = x.iter().map(|&k| t * (k as f64 * delta)).collect();
            snap(&image, delta)
        }
        OracleAction::Matrices(ms) => {
            let m = &ms[a_index];
            let n = x.len();
            let image: Vec<f64> =
                (0..n).map(|i| (0..n).map(|j| m[(i, j)] * (x[j] as f64 * delta)).sum()).collect();
            snap(&image, delta)
        }
    }
}

/// Values of all expression trees with exactly `n` atoms, duplicates kept.
/// A leaf is an element of `X`; `a.e` adds one atom; `e1 ± e2` adds the
/// atoms of both sides.
fn trees(n: usize, a: &[Vec<i64>], x: &[Vec<i64>], action: &OracleAction, delta: f64, memo: &mut Vec<Vec<Vec<i64>>>) -> Vec<Vec<i64>> {
    if n < memo.len() {
        return memo[n].clone();
    }
    let out = if n == 1 {
        x.to_vec()
    } else {
        let mut out = Vec::new();
        for e in trees(n - 1, a, x, action, delta, memo) {
            for (i, ai) in a.iter().enumerate() {
                out.push(act(action, i, ai, &e, delta));
            }
        }
        for i in 1..n {
            let left = trees(i, a, x, action, delta, memo);
            let right = trees(n - i, a, x, action, delta, memo);
            for l in &left {
                for r in &right {
                    out.push(l.iter().zip(r).map(|(p, q)| p + q).collect());
                    out.push(l.iter().zip(r).map(|(p, q)| p - q).collect());
                }
            }
        }
        out
    };
    if n == memo.len() {
        memo.push(out.clone());
    }
    out
}

/// `<A, X>_s` by enumerating every expression tree with at most `s` atoms.
pub fn brute_force_generated(
    a: &[Vec<i64>],
    x: &[Vec<i64>],
    s: usize,
    action: &OracleAction,
    delta: f64,
) -> BTreeSet<Vec<i64>> {
    let mut memo = vec![Vec::new()];
    (1..=s).flat_map(|n| trees(n, a, x, action, delta, &mut memo)).collect()
}

/// Backends exercised by the covering tests, with a sampling radius that
/// stays inside each chart.
pub fn covering_backends() -> Vec<(Backend, f64)> {
    vec![
        (Backend::Abelian(1), 1.0),
        (Backend::Abelian(2), 1.0),
        (Backend::Abelian(3), 0.8),
        (Backend::Heisenberg3, 0.8),
        (Backend::Su2, 0.8),
        (Backend::Sl2r, 0.5),
        (Backend::Sl2rH3, 0.5),
    ]
}
