//! Sparse univariate polynomials over the integers, plus Laurent support.
//!
//! `IntPoly` stores only non-zero terms (exponent -> coefficient), so degrees in
//! the millions are fine as long as the term count stays small.  All arithmetic
//! is exact over arbitrary-precision integers.

use std::collections::BTreeMap;
use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse polynomial in one variable with `BigInt` coefficients.
///
/// Invariant: no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    terms: BTreeMap<u64, BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(0, c);
        }
        IntPoly { terms }
    }

    /// `c * x^e`.
    pub fn monomial(c: impl Into<BigInt>, e: u64) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        IntPoly { terms }
    }

    pub fn x() -> Self {
        IntPoly::monomial(1, 1)
    }

    /// Build from dense coefficients, lowest degree first.
    pub fn from_coeffs<T: Into<BigInt> + Clone>(coeffs: &[T]) -> Self {
        let mut p = IntPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            p.add_term(e as u64, c.clone().into());
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u64, BigInt)>) -> Self {
        let mut p = IntPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Add `c * x^e` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, e: u64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    /// Degree, `None` for the zero polynomial (stands for minus infinity).
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    /// Smallest exponent with a non-zero coefficient; `None` for zero.
    pub fn ord_x(&self) -> Option<u64> {
        self.terms.keys().next().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: u64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms.values().next_back().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// Iterate `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, -c);
        }
        out
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        let mut out = IntPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly { terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect() }
    }

    /// Multiply by `x^k`.
    pub fn mul_xpow(&self, k: u64) -> IntPoly {
        IntPoly { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    /// Divide by `x^k`; error unless every exponent is at least `k`.
    pub fn div_xpow(&self, k: u64) -> Result<IntPoly> {
        if self.terms.keys().any(|&e| e < k) {
            return Err(Error::NotDivisible);
        }
        Ok(IntPoly { terms: self.terms.iter().map(|(e, c)| (e - k, c.clone())).collect() })
    }

    pub fn pow(&self, mut n: u64) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `f(x^m)`; `m = 0` collapses to the value at 1.
    pub fn subst_xpow(&self, m: u64) -> IntPoly {
        let mut out = IntPoly::zero();
        for (e, c) in self.terms() {
            out.add_term(e * m, c.clone());
        }
        out
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        // Horner over the sparse terms, highest exponent first.
        let mut acc = BigInt::zero();
        let mut prev_exp: Option<u64> = None;
        for (e, c) in self.terms.iter().rev() {
            if let Some(pe) = prev_exp {
                acc *= pow_bigint(x, pe - e);
            }
            acc += c;
            prev_exp = Some(*e);
        }
        if let Some(pe) = prev_exp {
            acc *= pow_bigint(x, pe);
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        let mut out = IntPoly::zero();
        for (e, c) in self.terms() {
            if e > 0 {
                out.add_term(e - 1, c * BigInt::from(e));
            }
        }
        out
    }

    /// Gcd of all coefficients, non-negative; 0 only for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `self / content`, leading coefficient sign preserved; zero stays zero.
    pub fn primitive_part(&self) -> IntPoly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        IntPoly { terms: self.terms.iter().map(|(e, a)| (*e, a / &c)).collect() }
    }

    /// Exact division; `Err(NotDivisible)` when `other` does not divide `self` in Z[x].
    pub fn div_exact(&self, other: &IntPoly) -> Result<IntPoly> {
        if other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(IntPoly::zero());
        }
        let dd = other.degree().unwrap();
        let lc = other.leading_coeff();
        let mut rem = self.clone();
        let mut quot = IntPoly::zero();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                return Err(Error::NotDivisible);
            }
            let (q, r) = rem.leading_coeff().div_rem(&lc);
            if !r.is_zero() {
                return Err(Error::NotDivisible);
            }
            let shift = dr - dd;
            quot.add_term(shift, q.clone());
            let t = IntPoly::monomial(q, shift);
            rem = rem.sub(&t.mul(other));
        }
        Ok(quot)
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        other.div_exact(self).is_ok()
    }

    /// Coefficient-reversed polynomial `x^{deg f} f(1/x)`; zero maps to zero.
    pub fn reciprocal(&self) -> IntPoly {
        match self.degree() {
            None => IntPoly::zero(),
            Some(d) => IntPoly {
                terms: self.terms.iter().map(|(e, c)| (d - e, c.clone())).collect(),
            },
        }
    }

    /// True iff `f = ±f̃`.
    pub fn is_reciprocal(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        let r = self.reciprocal();
        *self == r || *self == r.neg()
    }

    /// Sum of squared coefficients (the squared 2-norm, kept exact).
    pub fn norm2_sq(&self) -> BigInt {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Largest absolute coefficient value.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sign of the leading coefficient: 1, -1, or 0 for zero.
    pub fn lc_sign(&self) -> i32 {
        let lc = self.leading_coeff();
        if lc.is_zero() {
            0
        } else if lc.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Ordering used everywhere factor lists must be deterministic:
    /// degree first, then coefficients compared from the constant term up.
    pub fn cmp_factor_order(&self, other: &IntPoly) -> Ordering {
        let da = self.degree().map_or(-1i128, |d| d as i128);
        let db = other.degree().map_or(-1i128, |d| d as i128);
        da.cmp(&db).then_with(|| {
            let top = self.degree().unwrap_or(0).max(other.degree().unwrap_or(0));
            for e in 0..=top {
                let c = self.coeff(e).cmp(&other.coeff(e));
                if c != Ordering::Equal {
                    return c;
                }
            }
            Ordering::Equal
        })
    }
}

fn pow_bigint(x: &BigInt, e: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut base = x.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Sparse Laurent polynomial: exponents may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// The J operator: multiply by the unique power of x giving a polynomial
    /// with non-zero constant term.  Returns the polynomial and the shift applied.
    pub fn j_normalize(&self) -> Result<(IntPoly, i64)> {
        let m = self.min_exp().ok_or(Error::ZeroPolynomial)?;
        let p = IntPoly::from_terms(
            self.terms().map(|(e, c)| ((e - m) as u64, c.clone())),
        );
        debug_assert!(!p.constant_term().is_zero());
        Ok((p, -m))
    }

    pub fn from_int_poly(p: &IntPoly) -> Self {
        LaurentPoly::from_terms(p.terms().map(|(e, c)| (e as i64, c.clone())))
    }
}
