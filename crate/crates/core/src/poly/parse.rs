//! Text format for polynomials.
//!
//! Signed sums of products of `x<idx>`, `x<idx>^<int>`, integer or rational
//! literals `p` / `p/q`, and parenthesized subexpressions raised to integer
//! powers.  `*` between factors is optional, whitespace is insignificant.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeSet;
use std::fmt;

use super::{Monomial, Polynomial, QPoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let n = self.integer()?;
        u32::try_from(&n).map_or_else(|_| self.err("exponent too large"), Ok)
    }

    fn expr(&mut self) -> Result<QPoly, ParseError> {
        let mut total = Polynomial::zero(self.nvars);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.bump();
                -1
            }
            Some(b'+') => {
                self.bump();
                1
            }
            _ => 1,
        };
        loop {
            let t = self.term()?;
            total = if sign >= 0 { total.add(&t) } else { total.sub(&t) };
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    sign = 1;
                }
                Some(b'-') => {
                    self.bump();
                    sign = -1;
                }
                _ => return Ok(total),
            }
        }
    }

    fn term(&mut self) -> Result<QPoly, ParseError> {
        let mut product = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    let f = self.factor()?;
                    product = product.mul(&f);
                }
                // implicit multiplication before anything that starts a factor
                Some(c) if c == b'x' || c == b'(' || c.is_ascii_digit() => {
                    let f = self.factor()?;
                    product = product.mul(&f);
                }
                _ => return Ok(product),
            }
        }
    }

    fn factor(&mut self) -> Result<QPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint()?;
            Ok(base.pow(e))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<QPoly, ParseError> {
        match self.peek() {
            Some(b'x') => {
                self.bump();
                let idx_pos = self.pos;
                let idx = self.uint()?;
                if idx as usize >= self.nvars {
                    return Err(ParseError {
                        pos: idx_pos,
                        message: format!(
                            "variable x{} out of range (expected x0..x{})",
                            idx,
                            self.nvars - 1
                        ),
                    });
                }
                Ok(Polynomial::monomial(
                    self.nvars,
                    Monomial::var(self.nvars, idx as usize, 1),
                    num_traits::One::one(),
                ))
            }
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let value = if self.peek() == Some(b'/') {
                    self.bump();
                    let den_pos = self.pos;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(ParseError {
                            pos: den_pos,
                            message: "zero denominator".into(),
                        });
                    }
                    BigRational::new(num, den)
                } else {
                    BigRational::from(num)
                };
                Ok(Polynomial::constant(self.nvars, value))
            }
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a polynomial in variables `x0..xn` (so `n+1` variables).
pub fn parse(text: &str, n: usize) -> Result<QPoly, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, nvars: n + 1 };
    let poly = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(poly)
}

/// Parse and insist on a homogeneous result; the error lists the degrees
/// that occur when the input mixes them.
pub fn parse_homogeneous(text: &str, n: usize) -> Result<QPoly, ParseError> {
    let poly = parse(text, n)?;
    if poly.is_zero() || poly.homogeneous_degree().is_some() {
        return Ok(poly);
    }
    let degrees: BTreeSet<u32> = poly.terms().map(|(m, _)| m.degree()).collect();
    Err(ParseError {
        pos: 0,
        message: format!(
            "inhomogeneous polynomial: terms of degrees {:?}",
            degrees.into_iter().collect::<Vec<_>>()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jarek_cubic_expands_to_six_monomials() {
        let f = parse("x0^2*x2 + 6*x1^2*x3 - 3*(x0+x1)^2*x4", 4).unwrap();
        assert_eq!(f.homogeneous_degree(), Some(3));
        // x0^2 x2, x1^2 x3, x0^2 x4, x0 x1 x4, x1^2 x4 -- the cross term
        // of the square contributes one, totalling 5 monomials... the square
        // expands to three, two of which are new.
        assert_eq!(f.num_terms(), 5);
        assert_eq!(
            f.coeff(&Monomial::new(vec![1, 1, 0, 0, 1])),
            BigRational::from(BigInt::from(-6))
        );
    }

    #[test]
    fn single_monomial() {
        let f = parse("x0^3", 0).unwrap();
        assert_eq!(f.num_terms(), 1);
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn cancellation_gives_zero() {
        let f = parse("x0*x1 - x1*x0", 1).unwrap();
        assert!(f.is_zero());
        assert!(parse_homogeneous("x0*x1 - x1*x0", 1).is_ok());
    }

    #[test]
    fn rational_literals_and_implicit_mult() {
        let f = parse("3/4 x0 2x1", 1).unwrap();
        // 3/4 * x0 * 2 * x1
        assert_eq!(
            f.coeff(&Monomial::new(vec![1, 1])),
            BigRational::new(3.into(), 2.into())
        );
    }

    #[test]
    fn syntax_error_carries_position() {
        let e = parse("x0 + @", 1).unwrap_err();
        assert_eq!(e.pos, 5);
    }

    #[test]
    fn out_of_range_variable_rejected() {
        assert!(parse("x5", 3).is_err());
    }

    #[test]
    fn inhomogeneous_rejected_with_degrees() {
        let e = parse_homogeneous("x0^2 + x1", 1).unwrap_err();
        assert!(e.message.contains('1') && e.message.contains('2'));
    }
}
