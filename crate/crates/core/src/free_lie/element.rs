use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::algebra::FreeLieAlgebra;
use super::lyndon::LyndonWord;
use super::tensor::TensorSeries;

/// Minimal degree of a nonzero homogeneous component.
///
/// `Zero` is the valuation of the zero element and compares above every
/// finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Degree(usize),
    Zero,
}

impl Valuation {
    /// `true` when the valuation is at least `k` (always for zero).
    pub fn at_least(self, k: usize) -> bool {
        match self {
            Valuation::Zero => true,
            Valuation::Degree(d) => d >= k,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Zero => write!(f, "zero"),
            Valuation::Degree(d) => write!(f, "{d}"),
        }
    }
}

/// Element of a truncated free Lie algebra in the Lyndon basis.
///
/// Terms are kept sparse with no zero coefficients; keys are basis indices,
/// which order terms by degree and then lexicographically.
#[derive(Clone)]
pub struct FreeLieElement<K> {
    alg: Arc<FreeLieAlgebra<K>>,
    terms: BTreeMap<usize, K>,
}

impl<K: Field> FreeLieElement<K> {
    pub fn zero(alg: &Arc<FreeLieAlgebra<K>>) -> Self {
        FreeLieElement { alg: Arc::clone(alg), terms: BTreeMap::new() }
    }

    /// The generator `x{i+1}` (zero-based index).
    pub fn generator(alg: &Arc<FreeLieAlgebra<K>>, i: usize) -> Self {
        assert!(i < alg.generators(), "generator index {i} out of range");
        Self::basis_element(alg, i)
    }

    pub fn basis_element(alg: &Arc<FreeLieAlgebra<K>>, idx: usize) -> Self {
        let mut e = Self::zero(alg);
        e.terms.insert(idx, K::one());
        e
    }

    pub fn from_terms(alg: &Arc<FreeLieAlgebra<K>>, terms: impl IntoIterator<Item = (usize, K)>) -> Self {
        let mut e = Self::zero(alg);
        for (idx, c) in terms {
            e.add_term(idx, c);
        }
        e
    }

    /// Builds an element from `(Lyndon letters, coefficient)` pairs.
    pub fn from_words(
        alg: &Arc<FreeLieAlgebra<K>>,
        words: impl IntoIterator<Item = (Vec<u8>, K)>,
    ) -> Result<Self> {
        let mut e = Self::zero(alg);
        for (letters, c) in words {
            let idx = alg
                .index_of(&letters)
                .ok_or_else(|| Error::usage(format!("{letters:?} is not a basis word of this algebra")))?;
            e.add_term(idx, c);
        }
        Ok(e)
    }

    fn add_term(&mut self, idx: usize, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&idx);
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    pub fn algebra(&self) -> &Arc<FreeLieAlgebra<K>> {
        &self.alg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(basis index, coefficient)` pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &K)> + '_ {
        self.terms.iter().map(|(i, c)| (*i, c))
    }

    pub fn words(&self) -> impl Iterator<Item = (&LyndonWord, &K)> + '_ {
        self.terms.iter().map(|(i, c)| (&self.alg.basis()[*i], c))
    }

    pub fn coefficient(&self, letters: &[u8]) -> K {
        self.alg
            .index_of(letters)
            .and_then(|i| self.terms.get(&i).cloned())
            .unwrap_or_else(K::zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg)
            || (self.alg.generators() == other.alg.generators() && self.alg.order() == other.alg.order())
        {
            Ok(())
        } else {
            Err(Error::usage(format!(
                "mismatched algebras: (s={}, order={}) vs (s={}, order={})",
                self.alg.generators(),
                self.alg.order(),
                other.alg.generators(),
                other.alg.order()
            )))
        }
    }

    /// Sum; panics on mismatched algebras (see [`Self::try_add`]).
    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("mismatched algebras")
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(*i, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-K::one())
    }

    pub fn scale(&self, factor: &K) -> Self {
        if factor.is_zero() {
            return Self::zero(&self.alg);
        }
        FreeLieElement {
            alg: Arc::clone(&self.alg),
            terms: self.terms.iter().map(|(i, c)| (*i, c.clone() * factor.clone())).collect(),
        }
    }

    /// Multiplies the degree-`k` component by `factor^k`: the substitution
    /// `x_i -> factor * x_i`.
    pub fn scale_degrees(&self, factor: &K) -> Self {
        let mut powers = vec![K::one()];
        for _ in 0..self.alg.order() {
            let next = powers.last().expect("nonempty").clone() * factor.clone();
            powers.push(next);
        }
        FreeLieElement::from_terms(
            &self.alg,
            self.terms
                .iter()
                .map(|(i, c)| (*i, c.clone() * powers[self.alg.degree(*i)].clone())),
        )
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(self.bracket_upto(other, self.alg.order()))
    }

    /// Bracket truncated above `max_degree`.
    pub(crate) fn bracket_upto(&self, other: &Self, max_degree: usize) -> Self {
        let mut acc: BTreeMap<usize, K> = BTreeMap::new();
        for (&i, ci) in &self.terms {
            let di = self.alg.degree(i);
            for (&j, cj) in &other.terms {
                if di + self.alg.degree(j) > max_degree {
                    continue;
                }
                let (sign, table) = self.alg.basis_bracket(i, j);
                let Some(table) = table else { continue };
                let factor = if sign > 0 {
                    ci.clone() * cj.clone()
                } else {
                    -(ci.clone() * cj.clone())
                };
                for (k, ck) in table {
                    let slot = acc.entry(*k).or_insert_with(K::zero);
                    *slot = slot.clone() + factor.clone() * ck.clone();
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        FreeLieElement { alg: Arc::clone(&self.alg), terms: acc }
    }

    /// Drops every term of degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Self {
        FreeLieElement {
            alg: Arc::clone(&self.alg),
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| self.alg.degree(**i) <= max_degree)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, degree: usize) -> Self {
        FreeLieElement {
            alg: Arc::clone(&self.alg),
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| self.alg.degree(**i) == degree)
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    pub fn valuation(&self) -> Valuation {
        self.terms
            .keys()
            .next()
            .map_or(Valuation::Zero, |&i| Valuation::Degree(self.alg.degree(i)))
    }

    /// `log(exp(self) exp(other))` truncated above degree `order`.
    pub fn bch(&self, other: &Self, order: usize) -> Result<Self> {
        self.check_same(other)?;
        if order > self.alg.order() {
            return Err(Error::usage(format!(
                "BCH order {order} exceeds the algebra's truncation order {}",
                self.alg.order()
            )));
        }
        if self.is_zero() {
            return Ok(other.truncate(order));
        }
        if other.is_zero() {
            return Ok(self.truncate(order));
        }
        let mut memo: HashMap<Vec<u8>, Self> = HashMap::new();
        let mut total = Self::zero(&self.alg);
        for (word, c) in self.alg.bch_terms() {
            if word.degree() > order {
                continue;
            }
            let value = self.substitute_two(word, other, order, &mut memo);
            for (i, v) in &value.terms {
                total.add_term(*i, v.clone() * c.clone());
            }
        }
        Ok(total)
    }

    /// Evaluates the standard bracketing of a two-letter Lyndon word at
    /// `x1 -> self`, `x2 -> other`, truncated above `order`.
    fn substitute_two(
        &self,
        word: &LyndonWord,
        other: &Self,
        order: usize,
        memo: &mut HashMap<Vec<u8>, Self>,
    ) -> Self {
        if let Some(v) = memo.get(word.letters()) {
            return v.clone();
        }
        let value = match word.standard_factorization() {
            None => {
                if word.letters()[0] == 0 {
                    self.truncate(order)
                } else {
                    other.truncate(order)
                }
            }
            Some((u, v)) => {
                let left = self.substitute_two(&u, other, order, memo);
                let right = self.substitute_two(&v, other, order, memo);
                left.bracket_upto(&right, order)
            }
        };
        memo.insert(word.letters().to_vec(), value.clone());
        value
    }

    /// Inverse in the truncated group `(algebra, bch)`.
    pub fn star_inverse(&self) -> Self {
        self.neg()
    }

    /// Associative expansion in the truncated tensor algebra.
    pub fn to_series(&self) -> TensorSeries<K> {
        let s = self.alg.generators();
        let mut out = TensorSeries::<K>::zero(s, self.alg.order());
        for (i, c) in &self.terms {
            let k = self.alg.degree(*i);
            let part = out.degree_part_mut(k);
            for (w, e) in self.alg.expansion(*i) {
                part[*w] = part[*w].clone() + c.clone() * e.clone();
            }
        }
        out
    }

    /// Evaluates the element in a concrete Lie algebra, given the images of
    /// the generators, the bracket, and the linear operations of the target.
    pub fn evaluate<V: Clone>(
        &self,
        generators: &[V],
        zero: V,
        bracket: &impl Fn(&V, &V) -> V,
        axpy: &impl Fn(&mut V, f64, &V),
    ) -> Result<V> {
        if generators.len() != self.alg.generators() {
            return Err(Error::usage(format!(
                "expected {} generator images, got {}",
                self.alg.generators(),
                generators.len()
            )));
        }
        let mut memo: HashMap<Vec<u8>, V> = HashMap::new();
        let mut out = zero;
        for (i, c) in &self.terms {
            let value = eval_word(&self.alg.basis()[*i], generators, bracket, &mut memo);
            axpy(&mut out, c.to_real(), &value);
        }
        Ok(out)
    }
}

fn eval_word<V: Clone>(
    word: &LyndonWord,
    generators: &[V],
    bracket: &impl Fn(&V, &V) -> V,
    memo: &mut HashMap<Vec<u8>, V>,
) -> V {
    if let Some(v) = memo.get(word.letters()) {
        return v.clone();
    }
    let value = match word.standard_factorization() {
        None => generators[word.letters()[0] as usize].clone(),
        Some((u, v)) => {
            let left = eval_word(&u, generators, bracket, memo);
            let right = eval_word(&v, generators, bracket, memo);
            bracket(&left, &right)
        }
    };
    memo.insert(word.letters().to_vec(), value.clone());
    value
}

impl<K: Field> PartialEq for FreeLieElement<K> {
    fn eq(&self, other: &Self) -> bool {
        self.check_same(other).is_ok() && self.terms == other.terms
    }
}

impl<K: Field> fmt::Debug for FreeLieElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeLieElement({self})")
    }
}
