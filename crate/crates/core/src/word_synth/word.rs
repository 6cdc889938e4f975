//! Words in the free group on `s` letters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free_lie::Bracketing;

/// A freely reduced word in the free group on `s` generators.
///
/// Stored as maximal runs `g_i^k` with `k != 0` and no two adjacent runs on
/// the same generator, which is exactly the freely reduced form. Generator
/// indices are zero based; the text form numbers them from 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupWord {
    s: usize,
    runs: Vec<(u8, i64)>,
}

impl GroupWord {
    pub fn identity(s: usize) -> Self {
        GroupWord { s, runs: Vec::new() }
    }

    /// The single letter `g_i^exponent`.
    pub fn letter(s: usize, i: usize, exponent: i64) -> Result<Self> {
        let mut w = Self::identity(s);
        w.push(i, exponent)?;
        Ok(w)
    }

    pub fn from_runs(s: usize, runs: impl IntoIterator<Item = (usize, i64)>) -> Result<Self> {
        let mut w = Self::identity(s);
        for (i, k) in runs {
            w.push(i, k)?;
        }
        Ok(w)
    }

    /// Right-multiplies by `g_i^exponent`, reducing freely.
    pub fn push(&mut self, i: usize, exponent: i64) -> Result<()> {
        if i >= self.s {
            return Err(Error::usage(format!("generator g{} outside g1..g{}", i + 1, self.s)));
        }
        self.push_run(i as u8, exponent);
        Ok(())
    }

    fn push_run(&mut self, i: u8, exponent: i64) {
        if exponent == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some((j, k)) if *j == i => {
                *k += exponent;
                if *k == 0 {
                    self.runs.pop();
                }
            }
            _ => self.runs.push((i, exponent)),
        }
    }

    pub fn generators(&self) -> usize {
        self.s
    }

    /// Maximal runs `(generator, nonzero exponent)`.
    pub fn runs(&self) -> &[(u8, i64)] {
        &self.runs
    }

    /// Number of letters `g_i^{±1}`.
    pub fn len(&self) -> u64 {
        self.runs.iter().map(|(_, k)| k.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    /// The letters `(generator, ±1)` in order.
    pub fn letters(&self) -> impl Iterator<Item = (u8, i8)> + '_ {
        self.runs
            .iter()
            .flat_map(|&(i, k)| std::iter::repeat_n((i, k.signum() as i8), k.unsigned_abs() as usize))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.s = self.s.max(other.s);
        for &(i, k) in &other.runs {
            out.push_run(i, k);
        }
        out
    }

    pub fn inverse(&self) -> Self {
        GroupWord { s: self.s, runs: self.runs.iter().rev().map(|&(i, k)| (i, -k)).collect() }
    }

    /// `self^n`, with negative `n` meaning powers of the inverse.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Self::identity(self.s);
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// The group commutator `a b a^-1 b^-1`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Substitutes `g_i -> g_i^factor` for every generator.
    pub fn power_letters(&self, factor: i64) -> Self {
        let mut out = Self::identity(self.s);
        for &(i, k) in &self.runs {
            out.push_run(i, k * factor);
        }
        out
    }

    /// Evaluates the word in a group: `run(i, k)` must return the image of
    /// `g_i^k`, `mul` is the group law.
    pub fn evaluate<G>(&self, identity: G, run: impl Fn(usize, i64) -> G, mul: impl Fn(&G, &G) -> G) -> G {
        self.runs.iter().fold(identity, |acc, &(i, k)| mul(&acc, &run(i as usize, k)))
    }
}

/// Group commutator word of a bracketing tree: letters map to generators and
/// `[A, B]` maps to `A B A^-1 B^-1`.
pub fn bracketing_word(s: usize, tree: &Bracketing) -> Result<GroupWord> {
    tree.fold(
        &mut |i| GroupWord::letter(s, i as usize, 1),
        &mut |a: Result<GroupWord>, b: Result<GroupWord>| Ok(GroupWord::commutator(&a?, &b?)),
    )
}

/// Commutator word of a bracketing tree whose leading term is `n` times
/// the bracket.
///
/// The leading term is multilinear in the leaves, so raising two leaves to
/// powers `q` and `m` multiplies it by `qm`. With `|n| = qm + r` and
/// `m ~ sqrt|n|` this costs `O(sqrt|n|)` letters instead of the `O(|n|)` of
/// repeating [`bracketing_word`].
pub fn weighted_bracketing_word(s: usize, tree: &Bracketing, n: i64) -> Result<GroupWord> {
    fn leaf_depths(tree: &Bracketing, depth: usize, out: &mut Vec<usize>) {
        match tree {
            Bracketing::Letter(_) => out.push(depth),
            Bracketing::Bracket(a, b) => {
                leaf_depths(a, depth + 1, out);
                leaf_depths(b, depth + 1, out);
            }
        }
    }
    fn block(s: usize, tree: &Bracketing, exponents: &[(usize, i64)]) -> Result<GroupWord> {
        let mut pos = 0;
        tree.fold(
            &mut |i| {
                let exponent = exponents.iter().find(|(p, _)| *p == pos).map_or(1, |(_, e)| *e);
                pos += 1;
                GroupWord::letter(s, i as usize, exponent)
            },
            &mut |a: Result<GroupWord>, b: Result<GroupWord>| Ok(GroupWord::commutator(&a?, &b?)),
        )
    }
    if n == 0 {
        return Ok(GroupWord::identity(s));
    }
    let mut depths = Vec::new();
    leaf_depths(tree, 0, &mut depths);
    let mut order: Vec<usize> = (0..depths.len()).collect();
    order.sort_by_key(|&p| (depths[p], p));
    let sign = n.signum();
    let magnitude = n.unsigned_abs() as i64;
    if order.len() < 2 || magnitude < 4 {
        return block(s, tree, &[(order[0], n)]);
    }
    let m = (magnitude as f64).sqrt().round() as i64;
    let (q, r) = (magnitude / m, magnitude % m);
    let main = block(s, tree, &[(order[0], sign * q), (order[1], m)])?;
    if r == 0 {
        return Ok(main);
    }
    Ok(main.mul(&block(s, tree, &[(order[0], sign * r)])?))
}

/// The right-nested commutator `[g_{i1}, [g_{i2}, [..., g_{ik}]]]` (zero-based
/// indices).
pub fn commutator_word(s: usize, indices: &[usize]) -> Result<GroupWord> {
    let (&last, prefix) = indices
        .split_last()
        .ok_or_else(|| Error::usage("commutator of an empty index list"))?;
    let mut acc = GroupWord::letter(s, last, 1)?;
    for &i in prefix.iter().rev() {
        acc = GroupWord::commutator(&GroupWord::letter(s, i, 1)?, &acc);
    }
    Ok(acc)
}

impl fmt::Display for GroupWord {
    /// `g1^2 g2^-1 g1`; the identity prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        for (n, &(i, k)) in self.runs.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            if k == 1 {
                write!(f, "g{}", i + 1)?;
            } else {
                write!(f, "g{}^{k}", i + 1)?;
            }
        }
        Ok(())
    }
}

impl FromStr for GroupWord {
    type Err = Error;

    /// Parses whitespace-separated tokens `g<i>` or `g<i>^<k>`. The alphabet
    /// size is the largest generator index mentioned.
    fn from_str(text: &str) -> Result<Self> {
        let mut runs = Vec::new();
        let mut s = 0;
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let body = tok
                .strip_prefix('g')
                .ok_or_else(|| Error::parse(format!("bad letter '{tok}'")))?;
            let (idx, exp) = match body.split_once('^') {
                Some((i, e)) => (i, e),
                None => (body, "1"),
            };
            let idx: usize = idx.parse().map_err(|_| Error::parse(format!("bad letter '{tok}'")))?;
            let exp: i64 = exp.parse().map_err(|_| Error::parse(format!("bad exponent in '{tok}'")))?;
            if idx == 0 {
                return Err(Error::parse("generators are numbered from g1"));
            }
            s = s.max(idx);
            runs.push((idx - 1, exp));
        }
        GroupWord::from_runs(s, runs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_reduction() {
        let w: GroupWord = "g1 g2 g2^-1 g1^-1".parse().unwrap();
        assert!(w.is_empty());
        let w: GroupWord = "g1 g1 g2^-1 g2^-2".parse().unwrap();
        assert_eq!(w.runs(), &[(0, 2), (1, -3)]);
        assert_eq!(w.len(), 5);
        assert_eq!(w.to_string(), "g1^2 g2^-3");
        assert!(w.mul(&w.inverse()).is_empty());
    }

    #[test]
    fn letters_expand_runs() {
        let w: GroupWord = "g1^2 g2^-1".parse().unwrap();
        let letters: Vec<_> = w.letters().collect();
        assert_eq!(letters, vec![(0, 1), (0, 1), (1, -1)]);
    }

    #[test]
    fn commutator_words() {
        assert_eq!(commutator_word(2, &[0, 1]).unwrap().to_string(), "g1 g2 g1^-1 g2^-1");
        assert_eq!(commutator_word(2, &[0]).unwrap().to_string(), "g1");
        assert!(commutator_word(2, &[0, 0]).unwrap().is_empty());
        assert!(commutator_word(2, &[]).is_err());
        assert!(commutator_word(2, &[2]).is_err());
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["x1", "g0", "g1^", "g^2", "g1^a"] {
            assert!(bad.parse::<GroupWord>().is_err(), "{bad}");
        }
    }

    #[test]
    fn power_letters_scales_runs() {
        let w: GroupWord = "g1 g2^-1".parse().unwrap();
        assert_eq!(w.power_letters(3).to_string(), "g1^3 g2^-3");
        assert_eq!(w.pow(-2).to_string(), "g2 g1^-1 g2 g1^-1");
    }
}
