//! Greatest common divisors in Z[x] via the primitive pseudo-remainder sequence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::intpoly::IntPoly;

/// Pseudo-remainder: the remainder of `lc(b)^k * a` by `b` for the smallest
/// power `k` that keeps every division step integral.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.degree().expect("divisor must be non-zero");
    let lc_b = b.leading_coeff();
    let mut r = a.clone();
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let lead = IntPoly::monomial(r.leading_coeff(), dr - db);
        r = r.mul_scalar(&lc_b).sub(&lead.mul(b));
    }
    r
}

/// Gcd in Z[x]: primitive with positive leading coefficient, except that the
/// gcd with the zero polynomial keeps the other argument's content.
pub fn gcd_zx(a: &IntPoly, b: &IntPoly) -> IntPoly {
    fn normalize(p: &IntPoly) -> IntPoly {
        if p.lc_sign() < 0 {
            p.neg()
        } else {
            p.clone()
        }
    }
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let content_gcd = a.content().gcd(&b.content());
    let mut u = a.primitive_part();
    let mut v = b.primitive_part();
    if u.degree() < v.degree() {
        std::mem::swap(&mut u, &mut v);
    }
    while !v.is_zero() {
        let r = pseudo_rem(&u, &v).primitive_part();
        u = v;
        v = r;
    }
    normalize(&u).mul_scalar(&content_gcd)
}

/// Gcd of a whole family; empty families and all-zero families give 0.
pub fn gcd_many(polys: &[IntPoly]) -> IntPoly {
    let mut g = IntPoly::zero();
    for p in polys {
        g = gcd_zx(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// True iff the family has no common factor beyond units.
pub fn family_is_coprime(polys: &[IntPoly]) -> bool {
    let g = gcd_many(polys);
    g.degree() == Some(0) && g.content() == BigInt::one()
}

/// Largest exact power of `d` dividing `f`; returns (multiplicity, cofactor).
pub fn remove_factor(f: &IntPoly, d: &IntPoly) -> (u32, IntPoly) {
    let mut m = 0;
    let mut rest = f.clone();
    if d.is_zero() || d.degree().is_none() {
        return (0, rest);
    }
    while let Ok(q) = rest.div_exact(d) {
        rest = q;
        m += 1;
        if rest.is_zero() {
            break;
        }
    }
    (m, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> IntPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let common = p("x^2+x+1");
        let a = common.mul(&p("x-3"));
        let b = common.mul(&p("2*x+5"));
        assert_eq!(gcd_zx(&a, &b), common);
    }

    #[test]
    fn gcd_keeps_integer_content() {
        let a = p("6*x^2-6");
        let b = p("4*x+4");
        // gcd(6(x-1)(x+1), 4(x+1)) = 2(x+1).
        assert_eq!(gcd_zx(&a, &b), p("2*x+2"));
    }

    #[test]
    fn gcd_sign_is_normalized() {
        let a = p("-x^2-2*x-1");
        let b = p("-x-1");
        assert_eq!(gcd_zx(&a, &b), p("x+1"));
    }

    #[test]
    fn coprime_family_detection() {
        assert!(family_is_coprime(&[p("x+1"), p("x")]));
        assert!(!family_is_coprime(&[p("2*x"), p("2")]));
        assert!(!family_is_coprime(&[p("x^2-1"), p("x^2+2*x+1")]));
        assert!(family_is_coprime(&[
            p("1"),
            p("x+1"),
            p("2*x^4"),
        ]));
    }

    #[test]
    fn remove_factor_counts_multiplicity() {
        let f = p("x+1").pow(3).mul(&p("x-2"));
        let (m, rest) = remove_factor(&f, &p("x+1"));
        assert_eq!(m, 3);
        assert_eq!(rest, p("x-2"));
    }
}
