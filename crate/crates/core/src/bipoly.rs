//! Bivariate polynomials F(x, y) stored as a vector of y-coefficients in Z[x].
//!
//! The representation is dense in y (index = y-degree) and sparse in x, which
//! matches how these polynomials arise: few y-terms, possibly large x-degrees.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gcd::gcd_many;
use crate::intpoly::IntPoly;
use crate::parse::poly_to_string;

/// Polynomial in Z[x][y]; `ycoeffs[j]` is the coefficient of `y^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    ycoeffs: Vec<IntPoly>,
}

impl BiPoly {
    pub fn new(mut ycoeffs: Vec<IntPoly>) -> Self {
        while ycoeffs.last().map_or(false, |c| c.is_zero()) {
            ycoeffs.pop();
        }
        BiPoly { ycoeffs }
    }

    pub fn zero() -> Self {
        BiPoly { ycoeffs: Vec::new() }
    }

    pub fn from_yterms(terms: impl IntoIterator<Item = (u64, IntPoly)>) -> Self {
        let mut ycoeffs: Vec<IntPoly> = Vec::new();
        for (j, c) in terms {
            let j = j as usize;
            if ycoeffs.len() <= j {
                ycoeffs.resize(j + 1, IntPoly::zero());
            }
            ycoeffs[j] = ycoeffs[j].add(&c);
        }
        BiPoly::new(ycoeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.ycoeffs.is_empty()
    }

    /// Degree in y; `None` for the zero polynomial.
    pub fn deg_y(&self) -> Option<u64> {
        if self.ycoeffs.is_empty() {
            None
        } else {
            Some(self.ycoeffs.len() as u64 - 1)
        }
    }

    /// Largest x-degree over all coefficients.
    pub fn deg_x(&self) -> Option<u64> {
        self.ycoeffs.iter().filter_map(|c| c.degree()).max()
    }

    pub fn ycoeffs(&self) -> &[IntPoly] {
        &self.ycoeffs
    }

    pub fn ycoeff(&self, j: u64) -> IntPoly {
        self.ycoeffs
            .get(j as usize)
            .cloned()
            .unwrap_or_else(IntPoly::zero)
    }

    pub fn leading_ycoeff(&self) -> IntPoly {
        self.ycoeffs.last().cloned().unwrap_or_else(IntPoly::zero)
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly { ycoeffs: self.ycoeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let n = self.ycoeffs.len().max(other.ycoeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.ycoeff(j as u64).add(&other.ycoeff(j as u64)));
        }
        BiPoly::new(out)
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero();
        }
        let n = self.ycoeffs.len() + other.ycoeffs.len() - 1;
        let mut out = vec![IntPoly::zero(); n];
        for (i, a) in self.ycoeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.ycoeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        BiPoly::new(out)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> BiPoly {
        BiPoly::new(self.ycoeffs.iter().map(|f| f.mul_scalar(c)).collect())
    }

    /// Multiply every coefficient by `x^k`.
    pub fn mul_xpow(&self, k: u64) -> BiPoly {
        BiPoly { ycoeffs: self.ycoeffs.iter().map(|c| c.mul_xpow(k)).collect() }
    }

    pub fn mul_ypow(&self, k: u64) -> BiPoly {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let mut out = vec![IntPoly::zero(); k as usize];
        out.extend(self.ycoeffs.iter().cloned());
        BiPoly { ycoeffs: out }
    }

    /// Substitute `y = x^n`, collapsing to a univariate polynomial.
    pub fn eval_y_xpow(&self, n: u64) -> IntPoly {
        let mut out = IntPoly::zero();
        for (j, c) in self.ycoeffs.iter().enumerate() {
            for (e, a) in c.terms() {
                out.add_term(e + n * j as u64, a.clone());
            }
        }
        out
    }

    /// Substitute `y = y0`, leaving a univariate polynomial in x.
    pub fn eval_y(&self, y0: &BigInt) -> IntPoly {
        let mut out = IntPoly::zero();
        let mut pw = BigInt::one();
        for c in &self.ycoeffs {
            out = out.add(&c.mul_scalar(&pw));
            pw *= y0;
        }
        out
    }

    /// Substitute `x = x0`, leaving a univariate polynomial in y.
    pub fn eval_x(&self, x0: &BigInt) -> IntPoly {
        IntPoly::from_terms(
            self.ycoeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (j as u64, c.eval(x0))),
        )
    }

    pub fn eval(&self, x0: &BigInt, y0: &BigInt) -> BigInt {
        self.eval_x(x0).eval(y0)
    }

    /// Substitute `y -> y^m`.
    pub fn subst_y_pow(&self, m: u64) -> BiPoly {
        BiPoly::from_yterms(
            self.ycoeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (j as u64 * m, c.clone())),
        )
    }

    /// Substitute `x -> x^m` in every coefficient.
    pub fn subst_x_pow(&self, m: u64) -> BiPoly {
        BiPoly { ycoeffs: self.ycoeffs.iter().map(|c| c.subst_xpow(m)).collect() }
    }

    /// Substitute `y -> x^q * y` (q may be negative) and clear denominators:
    /// returns `(G, e)` with `x^e * F(x, x^q y) = G(x, y)` and `e` minimal.
    pub fn shift_y_by_xpow(&self, q: i64) -> (BiPoly, u64) {
        if self.is_zero() {
            return (BiPoly::zero(), 0);
        }
        let mut min_exp: i64 = 0;
        for (j, c) in self.ycoeffs.iter().enumerate() {
            if let Some(o) = c.ord_x() {
                min_exp = min_exp.min(o as i64 + q * j as i64);
            }
        }
        let e = (-min_exp).max(0) as u64;
        let out = self
            .ycoeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let shift = e as i64 + q * j as i64;
                if shift >= 0 {
                    c.mul_xpow(shift as u64)
                } else {
                    c.div_xpow((-shift) as u64)
                        .expect("shift chosen to keep exponents non-negative")
                }
            })
            .collect();
        (BiPoly { ycoeffs: out }, e)
    }

    /// Gcd in Z[x] of all y-coefficients.
    pub fn content_y(&self) -> IntPoly {
        gcd_many(&self.ycoeffs)
    }

    /// Gcd of all integer coefficients.
    pub fn content_int(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.ycoeffs {
            g = g.gcd(&c.content());
        }
        g
    }

    /// Remove the largest common power of x: returns `(F / x^m, m)`.
    pub fn strip_x(&self) -> (BiPoly, u64) {
        let m = self
            .ycoeffs
            .iter()
            .filter_map(|c| c.ord_x())
            .min()
            .unwrap_or(0);
        if m == 0 {
            return (self.clone(), 0);
        }
        let out = self
            .ycoeffs
            .iter()
            .map(|c| c.div_xpow(m).expect("m is the minimum order"))
            .collect();
        (BiPoly { ycoeffs: out }, m)
    }

    /// Exact division in Z[x][y]; errors when `other` is not a factor.
    pub fn div_exact_y(&self, other: &BiPoly) -> Result<BiPoly> {
        if other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(BiPoly::zero());
        }
        let dd = other.deg_y().unwrap();
        let lead = other.leading_ycoeff();
        let mut rem = self.clone();
        let mut quot = BiPoly::zero();
        while let Some(dr) = rem.deg_y() {
            if dr < dd {
                return Err(Error::NotDivisible);
            }
            let q = rem.leading_ycoeff().div_exact(&lead)?;
            let t = BiPoly::from_yterms([(dr - dd, q)]);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(other));
        }
        Ok(quot)
    }

    /// Number of non-zero monomials in x and y together.
    pub fn num_terms(&self) -> usize {
        self.ycoeffs.iter().map(|c| c.num_terms()).sum()
    }

    pub fn height(&self) -> BigInt {
        self.ycoeffs
            .iter()
            .map(|c| c.height())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Sum of squared coefficients over all monomials.
    pub fn norm2_sq(&self) -> BigInt {
        self.ycoeffs.iter().map(|c| c.norm2_sq()).sum()
    }
}

impl std::fmt::Display for BiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.ycoeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "({})", poly_to_string(c))?,
                1 => write!(f, "({})*y", poly_to_string(c))?,
                _ => write!(f, "({})*y^{}", poly_to_string(c), j)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> IntPoly {
        parse_poly(s).unwrap()
    }

    fn sample() -> BiPoly {
        // 1 - x(x+1) y - 2x^2 y^2 - x^2(x+1) y^3 + x^4 y^4
        BiPoly::new(vec![
            p("1"),
            p("-x^2-x"),
            p("-2*x^2"),
            p("-x^3-x^2"),
            p("x^4"),
        ])
    }

    #[test]
    fn substitute_y_as_power_of_x() {
        let f = sample();
        let u = f.eval_y_xpow(1);
        assert_eq!(u, p("x^8-x^6-x^5-2*x^4-x^3-x^2+1"));
        assert_eq!(f.eval_y_xpow(3).degree(), Some(16));
    }

    #[test]
    fn mul_and_exact_division_round_trip() {
        let a = BiPoly::new(vec![p("-x"), p("1")]); // y - x
        let b = BiPoly::new(vec![p("x^2"), p("x+1"), p("1")]); // y^2 + (x+1)y + x^2
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact_y(&a).unwrap(), b);
        assert_eq!(prod.div_exact_y(&b).unwrap(), a);
        let off = prod.add(&BiPoly::new(vec![p("1")]));
        assert!(off.div_exact_y(&a).is_err());
    }

    #[test]
    fn content_and_strip() {
        let f = BiPoly::new(vec![p("x^3+x^2"), p("2*x^2")]);
        assert_eq!(f.content_y(), p("x^2"));
        let (g, m) = f.strip_x();
        assert_eq!(m, 2);
        assert_eq!(g, BiPoly::new(vec![p("x+1"), p("2")]));
        assert_eq!(g.content_int(), BigInt::from(1));
    }

    #[test]
    fn shifting_y_by_negative_x_power_clears_denominators() {
        let f = sample();
        // y -> y/x: every coefficient of y^j is divided by x^j, then the whole
        // thing is scaled back up by x^4 to stay polynomial.
        let (g, e) = f.shift_y_by_xpow(-1);
        assert_eq!(e, 1);
        assert_eq!(
            g,
            BiPoly::new(vec![p("x"), p("-x^2-x"), p("-2*x"), p("-x-1"), p("x")])
        );
        // Consistency: G(x, x) = x^e F(x, 1).
        assert_eq!(g.eval_y_xpow(1), f.eval_y_xpow(0).mul_xpow(e));
    }

    #[test]
    fn evaluation_matches_substitution() {
        let f = sample();
        let x0 = BigInt::from(3);
        let y0 = BigInt::from(27);
        assert_eq!(f.eval(&x0, &y0), f.eval_y_xpow(3).eval(&x0));
    }
}
