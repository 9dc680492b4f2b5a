//! Text format for polynomials: parsing and canonical printing.
//!
//! Accepted terms look like `-x^7`, `4*x^6`, `4x^2`, `-x`, `17`; exponents may
//! be negative (`x^-3`), which yields a Laurent polynomial.  Whitespace is
//! ignored.  Printing always produces the canonical descending-exponent form
//! with explicit `*`, which parses back to the same polynomial.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::intpoly::{IntPoly, LaurentPoly};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
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

    fn parse_uint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        s.parse::<BigInt>().map_err(|e| self.err(&format!("bad integer: {e}")))
    }

    fn parse_exponent(&mut self) -> Result<i64> {
        self.skip_ws();
        let neg = if self.peek() == Some(b'-') {
            self.bump();
            true
        } else {
            if self.peek() == Some(b'+') {
                self.bump();
            }
            false
        };
        let n = self.parse_uint()?;
        let e: i64 = n
            .try_into()
            .map_err(|_| self.err("exponent too large"))?;
        Ok(if neg { -e } else { e })
    }

    /// One term after its sign: `coeff`, `coeff*x^e`, `x^e`, `x`, ...
    fn parse_term(&mut self) -> Result<(i64, BigInt)> {
        let mut coeff = BigInt::one();
        let mut saw_number = false;
        if matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            coeff = self.parse_uint()?;
            saw_number = true;
        }
        if self.peek() == Some(b'*') {
            self.bump();
            self.skip_ws();
        }
        match self.peek() {
            Some(b'x') | Some(b'X') => {
                self.bump();
                let e = if self.peek() == Some(b'^') {
                    self.bump();
                    self.parse_exponent()?
                } else {
                    1
                };
                Ok((e, coeff))
            }
            _ if saw_number => Ok((0, coeff)),
            _ => Err(self.err("expected a coefficient or 'x'")),
        }
    }

    fn parse_poly(&mut self) -> Result<LaurentPoly> {
        let mut poly = LaurentPoly::zero();
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None => {
                    if first {
                        return Err(self.err("empty input"));
                    }
                    break;
                }
                Some(b'+') => {
                    self.bump();
                    1
                }
                Some(b'-') => {
                    self.bump();
                    -1
                }
                Some(_) if first => 1,
                Some(_) => return Err(self.err("expected '+' or '-' between terms")),
            };
            let (e, c) = self.parse_term()?;
            poly.add_term(e, if sign < 0 { -c } else { c });
            first = false;
        }
        Ok(poly)
    }
}

/// Parse a Laurent polynomial (negative exponents allowed).
pub fn parse_laurent(s: &str) -> Result<LaurentPoly> {
    let mut p = Parser::new(s);
    let poly = p.parse_poly()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("trailing input"));
    }
    Ok(poly)
}

/// Parse an ordinary polynomial; negative exponents are rejected.
pub fn parse_poly(s: &str) -> Result<IntPoly> {
    let l = parse_laurent(s)?;
    if l.min_exp().map_or(false, |m| m < 0) {
        return Err(Error::NegativeExponent);
    }
    Ok(IntPoly::from_terms(l.terms().map(|(e, c)| (e as u64, c.clone()))))
}

fn push_term(out: &mut String, e: i64, c: &BigInt, first: bool) {
    let neg = c.is_negative();
    if first {
        if neg {
            out.push('-');
        }
    } else if neg {
        out.push('-');
    } else {
        out.push('+');
    }
    let a = c.abs();
    if e == 0 {
        out.push_str(&a.to_string());
        return;
    }
    if !a.is_one() {
        out.push_str(&a.to_string());
        out.push('*');
    }
    out.push('x');
    if e != 1 {
        out.push('^');
        out.push_str(&e.to_string());
    }
}

/// Canonical text: descending exponents, no spaces, explicit `*`.
pub fn poly_to_string(p: &IntPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        push_term(&mut out, e as i64, c, first);
        first = false;
    }
    out
}

/// Canonical text for Laurent polynomials.
pub fn laurent_to_string(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
        push_term(&mut out, e, c, first);
        first = false;
    }
    out
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&poly_to_string(self))
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&laurent_to_string(self))
    }
}

impl std::str::FromStr for IntPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}
