use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::element::FreeLieElement;
use super::lyndon::{lyndon_basis, Bracketing, LyndonWord};
use super::tensor::{factorial, word_letters, TensorSeries};

/// Largest supported truncation order. The tensor expansions are dense in
/// `s^order`, which bounds the practical range.
pub const MAX_ORDER: usize = 12;

type Terms<K> = Vec<(usize, K)>;

/// The free Lie algebra on `s` generators truncated above degree `order`,
/// together with everything needed to multiply in it: the Lyndon basis,
/// structure constants, and the BCH series. Built once, shared through `Arc`.
#[derive(Debug)]
pub struct FreeLieAlgebra<K> {
    s: usize,
    order: usize,
    basis: Vec<LyndonWord>,
    index: HashMap<Vec<u8>, usize>,
    /// `degree_start[k]` is the index of the first basis element of degree `k`
    /// (entry `order + 1` is the basis size).
    degree_start: Vec<usize>,
    /// Homogeneous associative expansion of each basis element, keyed by
    /// word index (lexicographic order within a degree).
    expansions: Vec<BTreeMap<usize, K>>,
    /// `[b_i, b_j]` for `i < j` with `deg_i + deg_j <= order`, keyed `i * n + j`.
    structure: HashMap<usize, Terms<K>>,
    /// BCH series in two letters: Lyndon words over `{x1, x2}` with their
    /// coefficients, up to `order`. Filled on first use.
    bch_terms: OnceLock<Vec<(LyndonWord, K)>>,
}

/// The precomputed tables are what the BCH routine consumes.
pub type BchCache<K> = FreeLieAlgebra<K>;

impl<K: Field> FreeLieAlgebra<K> {
    pub fn new(s: usize, order: usize) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::build_tables(s, order)?))
    }

    fn build_tables(s: usize, order: usize) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::usage(format!("truncation order {order} exceeds {MAX_ORDER}")));
        }
        let groups = lyndon_basis(s, order)?;
        let mut degree_start = vec![0, 0];
        let mut basis = Vec::new();
        for group in groups {
            basis.extend(group);
            degree_start.push(basis.len());
        }
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, w)| (w.letters().to_vec(), i))
            .collect();
        let expansions = basis.iter().map(|w| expand_sparse(s, &w.bracketing()).1).collect();
        let mut alg = FreeLieAlgebra {
            s,
            order,
            basis,
            index,
            degree_start,
            expansions,
            structure: HashMap::new(),
            bch_terms: OnceLock::new(),
        };
        let n = alg.basis.len();
        let mut structure = HashMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if alg.degree(i) + alg.degree(j) > order {
                    continue;
                }
                let (di, dj) = (alg.degree(i), alg.degree(j));
                let comm = sparse_commutator(
                    s,
                    (di, &alg.expansions[i]),
                    (dj, &alg.expansions[j]),
                );
                let terms = alg
                    .project_homogeneous(di + dj, comm)
                    .expect("commutator of Lie polynomials is a Lie polynomial");
                structure.insert(i * n + j, terms);
            }
        }
        alg.structure = structure;
        Ok(alg)
    }

    pub fn generators(&self) -> usize {
        self.s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn basis(&self) -> &[LyndonWord] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.basis[idx].degree()
    }

    pub fn degree_range(&self, k: usize) -> std::ops::Range<usize> {
        self.degree_start[k]..self.degree_start[k + 1]
    }

    pub fn index_of(&self, letters: &[u8]) -> Option<usize> {
        self.index.get(letters).copied()
    }

    /// Associative expansion of a basis element as `(word index, coefficient)`
    /// pairs of words of length `degree(idx)`.
    pub fn expansion(&self, idx: usize) -> &BTreeMap<usize, K> {
        &self.expansions[idx]
    }

    /// `[b_i, b_j]` in the Lyndon basis, truncated.
    pub fn basis_bracket(&self, i: usize, j: usize) -> (i8, Option<&Terms<K>>) {
        use std::cmp::Ordering::*;
        let n = self.basis.len();
        match i.cmp(&j) {
            Equal => (0, None),
            Less => (1, self.structure.get(&(i * n + j))),
            Greater => (-1, self.structure.get(&(j * n + i))),
        }
    }

    pub(crate) fn bch_terms(&self) -> &[(LyndonWord, K)] {
        self.bch_terms.get_or_init(|| {
            let two = Self::build_tables(2, self.order).expect("order already validated");
            dynkin_bch_terms(Arc::new(two))
        })
    }

    /// Rewrites a Lie polynomial given in the associative algebra as a
    /// combination of Lyndon basis elements. Fails when `p` is not a Lie
    /// polynomial.
    pub fn project(&self, p: &TensorSeries<K>) -> Result<Terms<K>> {
        if !p.constant_term().is_zero() {
            return Err(Error::usage("Lie polynomials have no constant term"));
        }
        let mut out = Vec::new();
        for k in 1..=self.order.min(p.order()) {
            let part: BTreeMap<usize, K> = p
                .degree_part(k)
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect();
            out.extend(self.project_homogeneous(k, part)?);
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    /// Projection of a homogeneous degree-`k` polynomial.
    ///
    /// Uses triangularity: the expansion of the standard bracketing of a
    /// Lyndon word `w` is `w` plus lexicographically larger words of the same
    /// length, so the smallest surviving word is always the next basis
    /// element to peel off.
    fn project_homogeneous(&self, k: usize, mut rest: BTreeMap<usize, K>) -> Result<Terms<K>> {
        let mut out = Vec::new();
        while let Some((pos, c)) = rest.pop_first() {
            let letters = word_letters(self.s, k, pos);
            let idx = self.index_of(&letters).ok_or_else(|| {
                Error::usage(format!(
                    "not a Lie polynomial: leading word {letters:?} is not Lyndon"
                ))
            })?;
            for (w, e) in &self.expansions[idx] {
                if *w == pos {
                    continue;
                }
                let updated = rest.get(w).cloned().unwrap_or_else(K::zero) - c.clone() * e.clone();
                if updated.is_zero() {
                    rest.remove(w);
                } else {
                    rest.insert(*w, updated);
                }
            }
            out.push((idx, c));
        }
        Ok(out)
    }

    pub fn element_from_series(self: &Arc<Self>, p: &TensorSeries<K>) -> Result<FreeLieElement<K>> {
        let terms = self.project(p)?;
        Ok(FreeLieElement::from_terms(self, terms))
    }
}

/// Homogeneous associative expansion of a bracketing tree: `(degree, terms)`.
pub(crate) fn expand_sparse<K: Field>(s: usize, tree: &Bracketing) -> (usize, BTreeMap<usize, K>) {
    tree.fold(
        &mut |i| (1, BTreeMap::from([(i as usize, K::one())])),
        &mut |a: (usize, BTreeMap<usize, K>), b: (usize, BTreeMap<usize, K>)| {
            (a.0 + b.0, sparse_commutator(s, (a.0, &a.1), (b.0, &b.1)))
        },
    )
}

fn sparse_commutator<K: Field>(
    s: usize,
    (da, a): (usize, &BTreeMap<usize, K>),
    (db, b): (usize, &BTreeMap<usize, K>),
) -> BTreeMap<usize, K> {
    let mut out: BTreeMap<usize, K> = BTreeMap::new();
    let shift_b = s.pow(db as u32);
    let shift_a = s.pow(da as u32);
    for (ia, ca) in a {
        for (ib, cb) in b {
            let prod = ca.clone() * cb.clone();
            let ab = out.entry(ia * shift_b + ib).or_insert_with(K::zero);
            *ab = ab.clone() + prod.clone();
            let ba = out.entry(ib * shift_a + ia).or_insert_with(K::zero);
            *ba = ba.clone() - prod;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Dynkin's series for `log(exp x exp y)` summed in the Lie algebra on two
/// generators, reported as Lyndon-basis terms.
fn dynkin_bch_terms<K: Field>(alg: Arc<FreeLieAlgebra<K>>) -> Vec<(LyndonWord, K)> {
    // Several index sequences expand to the same letter sequence; gather
    // their coefficients before bracketing.
    let mut by_letters: BTreeMap<Vec<u8>, K> = BTreeMap::new();
    for pairs in dynkin_index_sequences(alg.order) {
        let letters: Vec<u8> = pairs
            .iter()
            .flat_map(|&(r, s)| std::iter::repeat_n(0u8, r).chain(std::iter::repeat_n(1u8, s)))
            .collect();
        // The right-nested bracket vanishes when the two innermost letters coincide.
        if letters.len() >= 2 && letters[letters.len() - 1] == letters[letters.len() - 2] {
            continue;
        }
        let n = pairs.len() as i64;
        let denom: i64 = pairs
            .iter()
            .map(|&(r, s)| factorial(r) * factorial(s))
            .product::<i64>()
            * n
            * letters.len() as i64;
        let sign = if n % 2 == 1 { 1 } else { -1 };
        let c = by_letters.entry(letters).or_insert_with(K::zero);
        *c = c.clone() + K::from_ratio(sign, denom);
    }
    let x = FreeLieElement::generator(&alg, 0);
    let y = FreeLieElement::generator(&alg, 1);
    let mut total = FreeLieElement::zero(&alg);
    for (letters, c) in by_letters {
        if c.is_zero() {
            continue;
        }
        let (&last, prefix) = letters.split_last().expect("nonempty");
        let mut acc = if last == 0 { x.clone() } else { y.clone() };
        for &l in prefix.iter().rev() {
            if acc.is_zero() {
                break;
            }
            let g = if l == 0 { &x } else { &y };
            acc = g.bracket(&acc).expect("same algebra");
        }
        total = total.add(&acc.scale(&c));
    }
    total
        .terms()
        .map(|(idx, c)| (alg.basis[idx].clone(), c.clone()))
        .collect()
}

/// All sequences `((r1,s1),...,(rn,sn))` with `ri + si >= 1` and total degree
/// at most `order`.
pub(crate) fn dynkin_index_sequences(order: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        budget: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        for total in 1..=budget {
            for r in 0..=total {
                current.push((r, total - r));
                out.push(current.clone());
                rec(budget - total, current, out);
                current.pop();
            }
        }
    }
    rec(order, &mut current, &mut out);
    out
}
