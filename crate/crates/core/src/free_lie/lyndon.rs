use std::fmt;

use crate::error::{Error, Result};

/// A Lyndon word over the generators `x1..xs`.
///
/// Letters are stored zero-based; `Display` prints them one-based with the
/// standard bracketing, e.g. `[x1,[x1,x2]]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LyndonWord {
    letters: Vec<u8>,
}

impl LyndonWord {
    /// Checks the Lyndon property and wraps the letters.
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if !is_lyndon(&letters) {
            return Err(Error::usage(format!("{letters:?} is not a Lyndon word")));
        }
        Ok(LyndonWord { letters })
    }

    pub(crate) fn new_unchecked(letters: Vec<u8>) -> Self {
        debug_assert!(is_lyndon(&letters));
        LyndonWord { letters }
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn degree(&self) -> usize {
        self.letters.len()
    }

    /// Standard factorization `w = uv` where `v` is the longest proper Lyndon
    /// suffix. `None` for single letters.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        if self.letters.len() < 2 {
            return None;
        }
        let split = (1..self.letters.len())
            .find(|&i| is_lyndon(&self.letters[i..]))
            .expect("the last letter is always a Lyndon suffix");
        Some((
            LyndonWord::new_unchecked(self.letters[..split].to_vec()),
            LyndonWord::new_unchecked(self.letters[split..].to_vec()),
        ))
    }

    /// The bracketing tree induced by the standard factorization.
    pub fn bracketing(&self) -> Bracketing {
        match self.standard_factorization() {
            None => Bracketing::Letter(self.letters[0]),
            Some((u, v)) => Bracketing::Bracket(Box::new(u.bracketing()), Box::new(v.bracketing())),
        }
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bracketing())
    }
}

/// A binary bracketing of generator letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracketing {
    Letter(u8),
    Bracket(Box<Bracketing>, Box<Bracketing>),
}

impl Bracketing {
    pub fn degree(&self) -> usize {
        match self {
            Bracketing::Letter(_) => 1,
            Bracketing::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    /// Right-normed bracketing `[i1,[i2,...,[i(k-1),ik]]]`.
    pub fn right_normed(indices: &[u8]) -> Option<Bracketing> {
        let (&last, rest) = indices.split_last()?;
        Some(
            rest.iter()
                .rev()
                .fold(Bracketing::Letter(last), |acc, &i| {
                    Bracketing::Bracket(Box::new(Bracketing::Letter(i)), Box::new(acc))
                }),
        )
    }

    /// Folds the tree bottom-up.
    pub fn fold<T>(&self, leaf: &mut impl FnMut(u8) -> T, node: &mut impl FnMut(T, T) -> T) -> T {
        match self {
            Bracketing::Letter(i) => leaf(*i),
            Bracketing::Bracket(a, b) => {
                let left = a.fold(leaf, node);
                let right = b.fold(leaf, node);
                node(left, right)
            }
        }
    }
}

impl fmt::Display for Bracketing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracketing::Letter(i) => write!(f, "x{}", *i as usize + 1),
            Bracketing::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// A word is Lyndon iff it is nonempty and strictly smaller than each of its
/// proper rotations.
pub fn is_lyndon(w: &[u8]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    (1..n).all(|k| {
        let rotated = w[k..].iter().chain(&w[..k]);
        w.iter().lt(rotated)
    })
}

/// Lyndon words of length `1..=max_degree` over `s` letters, grouped by degree,
/// each group in lexicographic order.
pub fn lyndon_basis(s: usize, max_degree: usize) -> Result<Vec<Vec<LyndonWord>>> {
    if s == 0 {
        return Err(Error::usage("generator count must be at least 1"));
    }
    if max_degree == 0 {
        return Err(Error::usage("maximal degree must be at least 1"));
    }
    if s > u8::MAX as usize {
        return Err(Error::usage("at most 255 generators are supported"));
    }
    let mut groups = vec![Vec::new(); max_degree];
    // Duval's algorithm enumerates Lyndon words of length <= n in lex order.
    let mut w: Vec<u8> = vec![0];
    let top = (s - 1) as u8;
    while !w.is_empty() {
        groups[w.len() - 1].push(LyndonWord::new_unchecked(w.clone()));
        let m = w.len();
        while w.len() < max_degree {
            let c = w[w.len() - m];
            w.push(c);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        if let Some(last) = w.last_mut() {
            *last += 1;
        }
    }
    Ok(groups)
}

/// Number of Lyndon words of length `n` over `s` letters (Witt's formula).
pub fn witt_dimension(s: usize, n: usize) -> u128 {
    let s = s as u128;
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            total += mobius(d) as i128 * s.pow((n / d) as u32) as i128;
        }
    }
    (total / n as i128) as u128
}

fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}
