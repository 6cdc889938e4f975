//! Group words whose word map approximates `exp(C (x1 + ... + xs))`.
//!
//! [`synthesize`] runs the induction on the order: starting from
//! `g1 g2 ... gs`, the lowest-degree defect of the word's logarithm is
//! written in the Lyndon basis and cancelled by appending commutator words.
//! [`certify`] recomputes the defect from scratch in exact arithmetic.

mod word;

pub use word::{bracketing_word, commutator_word, weighted_bracketing_word, GroupWord};

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::free_lie::{FreeLieAlgebra, FreeLieElement, ScaledIntegerSeries, Valuation};
use crate::scalar::Field;
use crate::Rational;

/// Default cap on the number of letters of a synthesized word.
pub const DEFAULT_MAX_LETTERS: u64 = 1_000_000;

/// Symbolic logarithm of `w` after substituting `g_i -> exp(substitution[i])`,
/// truncated above degree `order`.
///
/// All substitution entries must live in the same algebra. When every entry
/// is the same rational multiple of its own generator the product of
/// exponentials is formed directly in the tensor algebra; otherwise the word
/// is folded run by run with [`FreeLieElement::bch`].
pub fn word_log<K: Field>(
    w: &GroupWord,
    substitution: &[FreeLieElement<K>],
    order: usize,
) -> Result<FreeLieElement<K>> {
    let alg = substitution
        .first()
        .ok_or_else(|| Error::usage("word_log needs at least one substitution entry"))?
        .algebra();
    if substitution.iter().any(|e| !Arc::ptr_eq(e.algebra(), alg)) {
        return Err(Error::usage("substitution entries live in different algebras"));
    }
    if order > alg.order() {
        return Err(Error::usage(format!(
            "order {order} exceeds the algebra's truncation order {}",
            alg.order()
        )));
    }
    if let Some(&(i, _)) = w.runs().iter().find(|(i, _)| *i as usize >= substitution.len()) {
        return Err(Error::usage(format!("no substitution given for g{}", i + 1)));
    }
    if let Some(q) = uniform_generator_scale(substitution) {
        if let Some(result) = word_log_scaled_generators(alg, w, &q, order)? {
            return Ok(result);
        }
    }
    let mut acc = FreeLieElement::zero(alg);
    for &(i, k) in w.runs() {
        let step = substitution[i as usize].scale(&K::from_ratio(k, 1));
        acc = acc.bch(&step, order)?;
    }
    Ok(acc)
}

/// `Some(q)` when `substitution[i] = q * x_{i+1}` for every entry.
fn uniform_generator_scale<K: Field>(substitution: &[FreeLieElement<K>]) -> Option<K> {
    let mut q: Option<K> = None;
    for (i, e) in substitution.iter().enumerate() {
        if i >= e.algebra().generators() {
            return None;
        }
        let c = match e.len() {
            0 => K::zero(),
            1 => {
                let (idx, c) = e.terms().next().expect("one term");
                if idx != i {
                    return None;
                }
                c.clone()
            }
            _ => return None,
        };
        match &q {
            None => q = Some(c),
            Some(prev) if *prev == c => {}
            Some(_) => return None,
        }
    }
    q
}

/// Product of `exp(k x_i)` over the runs in integer arithmetic, then the
/// substitution `x -> q x`. `None` if the coefficients do not fit `K`.
fn word_log_scaled_generators<K: Field>(
    alg: &Arc<FreeLieAlgebra<K>>,
    w: &GroupWord,
    q: &K,
    order: usize,
) -> Result<Option<FreeLieElement<K>>> {
    let mut series = ScaledIntegerSeries::one(alg.generators(), order);
    for &(i, k) in w.runs() {
        series.mul_exp_letter(i, k);
    }
    let Some(series) = series.into_series::<K>() else {
        return Ok(None);
    };
    let log = alg.element_from_series(&series.log())?;
    Ok(Some(log.scale_degrees(q)))
}

/// The substitution `x_i -> x_i / c` in `alg`.
pub fn scaled_generators<K: Field>(alg: &Arc<FreeLieAlgebra<K>>, c: u64) -> Vec<FreeLieElement<K>> {
    let inv = K::one() / K::from_ratio(c as i64, 1);
    (0..alg.generators())
        .map(|i| FreeLieElement::generator(alg, i).scale(&inv))
        .collect()
}

/// A word `w` and integer `C` with `log w(exp(x_1/C), ..., exp(x_s/C)) =
/// x_1 + ... + x_s` up to terms of degree `>= order`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SynthesizedApproximant {
    s: usize,
    order: usize,
    c: u64,
    word: GroupWord,
}

impl SynthesizedApproximant {
    /// Wraps an arbitrary `(C, w)` pair; [`certify`] decides whether it meets
    /// `order`.
    pub fn new(s: usize, order: usize, c: u64, word: GroupWord) -> Result<Self> {
        if c == 0 {
            return Err(Error::usage("the scale C must be positive"));
        }
        if word.runs().iter().any(|(i, _)| *i as usize >= s) {
            return Err(Error::usage(format!("word uses generators beyond g{s}")));
        }
        Ok(SynthesizedApproximant { s, order, c, word })
    }

    pub fn generators(&self) -> usize {
        self.s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn scale(&self) -> u64 {
        self.c
    }

    pub fn word(&self) -> &GroupWord {
        &self.word
    }
}

/// Outcome of [`certify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// Valuation of `log w(x/C) - (x_1 + ... + x_s)`.
    pub valuation: Valuation,
    pub order: usize,
    /// The defect itself, truncated above `order`.
    pub defect: FreeLieElement<Rational>,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.valuation.at_least(self.order)
    }
}

/// Exact defect of an approximant, computed in the free Lie algebra
/// truncated at `a.order()`.
pub fn certify(a: &SynthesizedApproximant) -> Result<Certificate> {
    let alg = FreeLieAlgebra::<Rational>::new(a.s, a.order.max(1))?;
    let defect = defect(&alg, &a.word, a.c, a.order)?;
    Ok(Certificate { valuation: defect.valuation(), order: a.order, defect })
}

fn defect(
    alg: &Arc<FreeLieAlgebra<Rational>>,
    w: &GroupWord,
    c: u64,
    order: usize,
) -> Result<FreeLieElement<Rational>> {
    let log = word_log(w, &scaled_generators(alg, c), order)?;
    let target = (0..alg.generators()).fold(FreeLieElement::zero(alg), |acc, i| {
        acc.add(&FreeLieElement::generator(alg, i))
    });
    Ok(log.sub(&target.truncate(order)))
}

/// [`synthesize_with_cap`] with the default letter cap.
pub fn synthesize(s: usize, order: usize) -> Result<SynthesizedApproximant> {
    synthesize_with_cap(s, order, DEFAULT_MAX_LETTERS)
}

/// Builds `(C, w)` certified to `order`.
///
/// Step `k` (for `k = 2 .. order-1`) takes the degree-`k` defect
/// `f = sum c_u P_u` over Lyndon brackets `P_u`, picks the least integer `D`
/// with every `c_u D^k` integral, and appends a commutator word of `P_u`
/// with one leaf raised to `n_u = -c_u D^k`, evaluated at `x / D`.
/// The two parts are brought to the common scale `C' = lcm(C, D)` by raising
/// each letter to the power `C'/C` or `C'/D` respectively.
pub fn synthesize_with_cap(s: usize, order: usize, max_letters: u64) -> Result<SynthesizedApproximant> {
    if order < 2 {
        return Err(Error::usage(format!("synthesis order must be at least 2, got {order}")));
    }
    let alg = FreeLieAlgebra::<Rational>::new(s, order)?;
    let mut word = GroupWord::from_runs(s, (0..s).map(|i| (i, 1)))?;
    let mut c: u64 = 1;
    for k in 2..order {
        let f = defect(&alg, &word, c, k)?;
        debug_assert!(f.valuation().at_least(k));
        if f.is_zero() {
            continue;
        }
        let d = least_clearing_scale(f.terms().map(|(_, q)| q), k)?;
        let c_next = c.lcm(&d);
        let mut correction = GroupWord::identity(s);
        let dk = BigInt::from(d).pow(k as u32);
        for (lyndon, coeff) in f.words() {
            let n = -(coeff * Rational::from_integer(dk.clone()));
            debug_assert!(n.is_integer());
            let n = n
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::ResourceLimit("commutator multiplicity overflows i64".into()))?;
            let block = weighted_bracketing_word(s, &lyndon.bracketing(), n)?;
            check_cap(
                block.len().saturating_add(correction.len()).saturating_mul(c_next / d),
                max_letters,
            )?;
            correction = correction.mul(&block);
        }
        check_cap(
            word.len().saturating_mul(c_next / c).saturating_add(correction.len() * (c_next / d)),
            max_letters,
        )?;
        word = word.power_letters((c_next / c) as i64).mul(&correction.power_letters((c_next / d) as i64));
        c = c_next;
    }
    SynthesizedApproximant::new(s, order, c, word)
}

fn check_cap(letters: u64, max_letters: u64) -> Result<()> {
    if letters > max_letters {
        return Err(Error::ResourceLimit(format!(
            "synthesized word would have {letters} letters, cap is {max_letters}"
        )));
    }
    Ok(())
}

/// Least `D >= 1` such that `q D^k` is an integer for every `q`.
fn least_clearing_scale<'a>(coeffs: impl Iterator<Item = &'a Rational>, k: usize) -> Result<u64> {
    let mut d: u64 = 1;
    for q in coeffs {
        let den = q
            .denom()
            .to_u64()
            .ok_or_else(|| Error::ResourceLimit("defect denominator overflows u64".into()))?;
        d = d.lcm(&kth_root_clearing(den, k));
    }
    Ok(d)
}

/// Least `D` with `den | D^k`: each prime `p^e` of `den` contributes
/// `p^ceil(e/k)`.
fn kth_root_clearing(mut den: u64, k: usize) -> u64 {
    let mut out = 1u64;
    let mut p = 2u64;
    while p * p <= den {
        let mut e = 0;
        while den % p == 0 {
            den /= p;
            e += 1;
        }
        if e > 0 {
            out *= p.pow((e + k as u32 - 1) / k as u32);
        }
        p += 1;
    }
    if den > 1 {
        out *= den;
    }
    out
}
