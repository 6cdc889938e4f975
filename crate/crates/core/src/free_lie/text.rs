//! Text form of Lie elements: `x1 + x2 + 1/2 [x1,x2] - 1/12 [[x1,x2],x2]`.
//!
//! Terms appear in canonical basis order, the coefficient `1` is omitted,
//! and the zero element prints as `0`. The parser accepts any bracketing of
//! generators (not only standard Lyndon bracketings) and normalizes it.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Field;

use super::algebra::FreeLieAlgebra;
use super::element::FreeLieElement;

impl<K: Field> fmt::Display for FreeLieElement<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (word, c)) in self.words().enumerate() {
            let negative = *c < K::zero();
            let magnitude = c.magnitude();
            match (n, negative) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                (_, false) => write!(f, " + ")?,
                (_, true) => write!(f, " - ")?,
            }
            if magnitude.is_one() {
                write!(f, "{word}")?;
            } else {
                write!(f, "{magnitude} {word}")?;
            }
        }
        Ok(())
    }
}

/// Parses the text form back into an element of `alg`.
pub fn parse_element<K: Field>(alg: &Arc<FreeLieAlgebra<K>>, text: &str) -> Result<FreeLieElement<K>> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, alg };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(Error::parse(format!("trailing input at byte {}", p.pos)));
    }
    Ok(e)
}

struct Parser<'a, K> {
    src: &'a [u8],
    pos: usize,
    alg: &'a Arc<FreeLieAlgebra<K>>,
}

impl<K: Field> Parser<'_, K> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(format!("expected '{}' at byte {}", b as char, self.pos)))
        }
    }

    fn sum(&mut self) -> Result<FreeLieElement<K>> {
        let mut total = FreeLieElement::zero(self.alg);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return Err(Error::parse("empty input")),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    K::one()
                }
                Some(b'-') => {
                    self.pos += 1;
                    -K::one()
                }
                Some(_) if first => K::one(),
                Some(c) => {
                    return Err(Error::parse(format!("unexpected '{}' at byte {}", c as char, self.pos)))
                }
            };
            first = false;
            let term = self.term()?;
            total = total.add(&term.scale(&sign));
        }
        Ok(total)
    }

    fn term(&mut self) -> Result<FreeLieElement<K>> {
        let coeff = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && matches!(self.src[self.pos], b'0'..=b'9' | b'/' | b'.' | b'e' | b'E')
                {
                    self.pos += 1;
                }
                let lit = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let c: K = lit
                    .parse()
                    .map_err(|_| Error::parse(format!("bad coefficient '{lit}'")))?;
                if matches!(self.peek(), Some(b'*')) {
                    self.pos += 1;
                }
                Some(c)
            }
            _ => None,
        };
        match (coeff, self.peek()) {
            (Some(c), Some(b'x' | b'[')) => Ok(self.bracket_expr()?.scale(&c)),
            (Some(c), _) if c.is_zero() => Ok(FreeLieElement::zero(self.alg)),
            (Some(_), _) => Err(Error::parse("constant terms are not Lie elements")),
            (None, _) => self.bracket_expr(),
        }
    }

    fn bracket_expr(&mut self) -> Result<FreeLieElement<K>> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx: usize = std::str::from_utf8(&self.src[start..self.pos])
                    .expect("ascii")
                    .parse()
                    .map_err(|_| Error::parse(format!("bad generator at byte {start}")))?;
                if idx == 0 || idx > self.alg.generators() {
                    return Err(Error::parse(format!(
                        "generator x{idx} outside x1..x{}",
                        self.alg.generators()
                    )));
                }
                Ok(FreeLieElement::generator(self.alg, idx - 1))
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.bracket_expr()?;
                self.expect(b',')?;
                let b = self.bracket_expr()?;
                self.expect(b']')?;
                a.bracket(&b)
            }
            _ => Err(Error::parse(format!("expected generator or bracket at byte {}", self.pos))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn prints_and_reparses() {
        let alg = FreeLieAlgebra::<BigRational>::new(2, 3).unwrap();
        let e = parse_element(&alg, "x1 + x2 + 1/2 [x1,x2] - 1/12 [[x1,x2],x2]").unwrap();
        assert_eq!(e.to_string(), "x1 + x2 + 1/2 [x1,x2] - 1/12 [[x1,x2],x2]");
        assert_eq!(parse_element(&alg, &e.to_string()).unwrap(), e);
    }

    #[test]
    fn normalizes_non_standard_brackets() {
        let alg = FreeLieAlgebra::<BigRational>::new(2, 3).unwrap();
        let e = parse_element(&alg, "[x2,x1]").unwrap();
        assert_eq!(e.to_string(), "-[x1,x2]");
        let e = parse_element(&alg, "[x2,[x2,x1]]").unwrap();
        assert_eq!(e.to_string(), "[[x1,x2],x2]");
        assert!(parse_element(&alg, "0").unwrap().is_zero());
    }

    #[test]
    fn rejects_garbage() {
        let alg = FreeLieAlgebra::<BigRational>::new(2, 3).unwrap();
        for bad in ["", "x3", "[x1,x2", "x1 x2", "2", "1/0x"] {
            assert!(parse_element(&alg, bad).is_err(), "{bad:?}");
        }
    }
}
