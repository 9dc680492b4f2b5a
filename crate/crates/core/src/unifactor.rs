//! Complete factorization in Z[x]: squarefree decomposition (Yun), then a
//! Zassenhaus-style split of each squarefree part (factor mod p, Hensel lift
//! to a Mignotte-sized modulus, recombine subsets by trial division).
//!
//! Output is fully deterministic: the randomized equal-degree stage uses a
//! fixed seed and every factor list is sorted degree-first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gcd::gcd_zx;
use crate::intpoly::IntPoly;
use crate::modpoly::{factor_squarefree_monic, primes_up_to, reduction_is_squarefree, ModPoly};

/// A complete factorization `f = unit * content * prod factors[i]^mult[i]`
/// with primitive irreducible factors of positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: i32,
    pub content: BigInt,
    pub factors: Vec<(IntPoly, u32)>,
}

impl Factorization {
    pub fn product(&self) -> IntPoly {
        let mut out = IntPoly::constant(self.content.clone());
        if self.unit < 0 {
            out = out.neg();
        }
        for (f, m) in &self.factors {
            out = out.mul(&f.pow(*m as u64));
        }
        out
    }

    /// Total number of irreducible factors counted with multiplicity.
    pub fn factor_count(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }
}

/// Squarefree decomposition of a primitive polynomial with positive leading
/// coefficient: pairwise coprime primitive squarefree parts of positive degree
/// with their multiplicities, in increasing multiplicity order.
pub fn yun_squarefree(f: &IntPoly) -> Vec<(IntPoly, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    let g = gcd_zx(f, &df);
    if g.degree() == Some(0) {
        return vec![(f.clone(), 1)];
    }
    let mut w = f.div_exact(&g).expect("gcd divides");
    let mut y = df.div_exact(&g).expect("gcd divides derivative");
    let mut z = y.sub(&w.derivative());
    let mut i = 1u32;
    while w.degree().unwrap_or(0) > 0 {
        let h = gcd_zx(&w, &z);
        if h.degree().unwrap_or(0) > 0 {
            out.push((h.clone(), i));
        }
        w = w.div_exact(&h).expect("gcd divides");
        y = z.div_exact(&h).expect("gcd divides");
        z = y.sub(&w.derivative());
        i += 1;
    }
    out
}

// Dense arithmetic on Vec<BigInt> with coefficients reduced into [0, m).

type DVec = Vec<BigInt>;

fn dv_trim(v: &mut DVec) {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
}

fn dv_from_int_poly(f: &IntPoly, m: &BigInt) -> DVec {
    let deg = f.degree().map_or(0, |d| d as usize);
    let mut v = vec![BigInt::zero(); deg + 1];
    for (e, c) in f.terms() {
        v[e as usize] = c.mod_floor(m);
    }
    dv_trim(&mut v);
    v
}

fn dv_from_mod_poly(h: &ModPoly) -> DVec {
    h.coeffs().iter().map(|&c| BigInt::from(c)).collect()
}

fn dv_mul(a: &DVec, b: &DVec, m: &BigInt) -> DVec {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    for c in out.iter_mut() {
        *c = c.mod_floor(m);
    }
    dv_trim(&mut out);
    out
}

fn dv_add(a: &DVec, b: &DVec, m: &BigInt) -> DVec {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero);
        out.push(s.mod_floor(m));
    }
    dv_trim(&mut out);
    out
}

fn dv_sub(a: &DVec, b: &DVec, m: &BigInt) -> DVec {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let s = a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero);
        out.push(s.mod_floor(m));
    }
    dv_trim(&mut out);
    out
}

/// Division by a monic polynomial (top coefficient exactly 1).
fn dv_divrem_monic(a: &DVec, b: &DVec, m: &BigInt) -> (DVec, DVec) {
    let db = b.len() - 1;
    debug_assert!(b.last().map_or(false, |c| c.is_one()));
    let mut r = a.clone();
    let mut q = vec![BigInt::zero(); a.len().saturating_sub(db)];
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        let pos = r.len() - 1 - db;
        if !lead.is_zero() {
            for (i, bc) in b.iter().enumerate() {
                let t = &r[pos + i] - &lead * bc;
                r[pos + i] = t.mod_floor(m);
            }
            q[pos] = lead;
        }
        r.pop();
    }
    dv_trim(&mut q);
    dv_trim(&mut r);
    (q, r)
}

/// Symmetric representative: coefficients mapped into (-m/2, m/2].
fn dv_to_sym_int_poly(v: &DVec, m: &BigInt) -> IntPoly {
    let half = m / 2;
    IntPoly::from_terms(v.iter().enumerate().map(|(e, c)| {
        let c = if c > &half { c - m } else { c.clone() };
        (e as u64, c)
    }))
}

/// One quadratic lifting step: from (f = g*h, s*g + t*h = 1) mod m to mod m^2.
/// h must be monic; when f is monic both outputs stay monic.
#[allow(clippy::too_many_arguments)]
fn hensel_step(
    f: &DVec,
    g: &DVec,
    h: &DVec,
    s: &DVec,
    t: &DVec,
    m: &BigInt,
) -> (DVec, DVec, DVec, DVec) {
    let m2 = m * m;
    let e = dv_sub(f, &dv_mul(g, h, &m2), &m2);
    let (q, r) = dv_divrem_monic(&dv_mul(s, &e, &m2), h, &m2);
    let g1 = dv_add(&dv_add(g, &dv_mul(t, &e, &m2), &m2), &dv_mul(&q, g, &m2), &m2);
    let h1 = dv_add(h, &r, &m2);
    let one = vec![BigInt::one()];
    let b = dv_sub(&dv_add(&dv_mul(s, &g1, &m2), &dv_mul(t, &h1, &m2), &m2), &one, &m2);
    let (c, d) = dv_divrem_monic(&dv_mul(s, &b, &m2), &h1, &m2);
    let s1 = dv_sub(s, &d, &m2);
    let t1 = dv_sub(&dv_sub(t, &dv_mul(t, &b, &m2), &m2), &dv_mul(&c, &g1, &m2), &m2);
    (g1, h1, s1, t1)
}

/// Lift the factorization `f = prod factors (mod p)` to modulus `p^(2^levels)`
/// by a balanced divide-and-conquer tree, returning the lifted factors.
fn hensel_tree(f: &DVec, factors: &[ModPoly], p: u64, levels: u32) -> Vec<DVec> {
    if factors.len() == 1 {
        return vec![f.clone()];
    }
    let (left, right) = factors.split_at(factors.len() / 2);
    let prod = |fs: &[ModPoly]| -> ModPoly {
        let mut acc = ModPoly::one(p);
        for h in fs {
            acc = acc.mul(h);
        }
        acc
    };
    let g0 = prod(left);
    let h0 = prod(right);
    let (one, s0, t0) = g0.xgcd(&h0);
    debug_assert!(one.is_one(), "modular factors must be pairwise coprime");
    let mut m = BigInt::from(p);
    let mut g = dv_from_mod_poly(&g0);
    let mut h = dv_from_mod_poly(&h0);
    let mut s = dv_from_mod_poly(&s0);
    let mut t = dv_from_mod_poly(&t0);
    let big = {
        let mut big = m.clone();
        for _ in 0..levels {
            big = &big * &big;
        }
        big
    };
    for _ in 0..levels {
        let fr: DVec = f.iter().map(|c| c.mod_floor(&(&m * &m))).collect();
        let (g1, h1, s1, t1) = hensel_step(&fr, &g, &h, &s, &t, &m);
        g = g1;
        h = h1;
        s = s1;
        t = t1;
        m = &m * &m;
    }
    debug_assert_eq!(m, big);
    let mut out = hensel_tree(&g, left, p, levels);
    out.extend(hensel_tree(&h, right, p, levels));
    out
}

/// Iterate over index subsets of `pool` of the given size, lexicographically.
fn for_each_subset(pool: &[usize], size: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        pool: &[usize],
        size: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if cur.len() == size {
            return f(cur);
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            if rec(pool, size, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::with_capacity(size);
    rec(pool, size, 0, &mut cur, &mut f)
}

/// Pick a prime for the given monic squarefree polynomial: among the first
/// few odd primes with squarefree reduction, the one with fewest modular
/// factors.  Returns the prime and its sorted modular factor list.
fn choose_prime(m: &IntPoly) -> (u64, Vec<ModPoly>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6f61_6374);
    let mut best: Option<(u64, Vec<ModPoly>)> = None;
    let mut good = 0;
    for p in primes_up_to(100_000).into_iter().skip(1) {
        if !reduction_is_squarefree(m, p) {
            continue;
        }
        let fac = factor_squarefree_monic(&ModPoly::from_int_poly(m, p), &mut rng);
        let better = best.as_ref().map_or(true, |(_, b)| fac.len() < b.len());
        if better {
            best = Some((p, fac));
        }
        good += 1;
        if good >= 3 || best.as_ref().map_or(false, |(_, b)| b.len() == 1) {
            break;
        }
    }
    best.expect("a squarefree polynomial has squarefree reductions")
}

/// Factor a monic squarefree polynomial with non-zero constant term.
fn factor_monic_squarefree(m: &IntPoly) -> Vec<IntPoly> {
    let n = m.degree().unwrap();
    if n == 1 {
        return vec![m.clone()];
    }
    let (p, modular) = choose_prime(m);
    if modular.len() == 1 {
        return vec![m.clone()];
    }
    // Mignotte-style bound: any factor has height at most 2^n * |m|_2.
    let norm2 = m.norm2_sq().sqrt() + 1;
    let bound = (BigInt::one() << n) * norm2 * 2 + 1;
    let mut mu = BigInt::from(p);
    let mut levels = 0u32;
    while mu < bound {
        mu = &mu * &mu;
        levels += 1;
    }
    let f0 = dv_from_int_poly(m, &mu);
    let lifted = hensel_tree(&f0, &modular, p, levels);
    let lifted: Vec<IntPoly> = lifted.iter().map(|v| dv_to_sym_int_poly(v, &mu)).collect();

    let mut pool: Vec<usize> = (0..lifted.len()).collect();
    let mut remaining = m.clone();
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= pool.len() {
        let mut hit: Option<(Vec<usize>, IntPoly)> = None;
        for_each_subset(&pool, size, |subset| {
            let mut prod = vec![BigInt::one()];
            for &i in subset {
                prod = dv_mul(&prod, &dv_from_int_poly(&lifted[i], &mu), &mu);
            }
            let cand = dv_to_sym_int_poly(&prod, &mu);
            // Cheap screen: the constant term must divide the true one.
            if cand.constant_term().is_zero()
                || !remaining.constant_term().is_multiple_of(&cand.constant_term())
            {
                return false;
            }
            if remaining.div_exact(&cand).is_ok() {
                hit = Some((subset.to_vec(), cand.clone()));
                return true;
            }
            false
        });
        match hit {
            Some((subset, cand)) => {
                remaining = remaining.div_exact(&cand).unwrap();
                found.push(cand);
                pool.retain(|i| !subset.contains(i));
                continue 'outer;
            }
            None => size += 1,
        }
    }
    if remaining.degree().unwrap_or(0) > 0 {
        found.push(remaining);
    }
    found
}

/// Factor a primitive squarefree polynomial with positive leading coefficient
/// into primitive irreducible factors with positive leading coefficients.
fn factor_squarefree_primitive(g: &IntPoly) -> Vec<IntPoly> {
    let mut out = Vec::new();
    let mut g = g.clone();
    // x itself is the only irreducible with zero constant term.
    if let Some(k) = g.ord_x() {
        if k > 0 {
            debug_assert_eq!(k, 1, "squarefree input has at most one factor of x");
            g = g.div_xpow(k).unwrap();
            out.push(IntPoly::x());
        }
    }
    let n = match g.degree() {
        None | Some(0) => return out,
        Some(n) => n,
    };
    if n == 1 {
        out.push(g);
        return out;
    }
    let lc = g.leading_coeff();
    if lc.is_one() {
        out.extend(factor_monic_squarefree(&g));
        return out;
    }
    // Monicize: m(x) = lc^(n-1) g(x/lc) is integral and monic; factors map
    // back via x -> lc*x followed by taking primitive parts.
    let mut monic = IntPoly::zero();
    for (e, c) in g.terms() {
        if e == n {
            monic.add_term(e, BigInt::one());
        } else {
            monic.add_term(e, c * lc.pow((n - 1 - e) as u32));
        }
    }
    debug_assert!(monic.leading_coeff().is_one());
    for m in factor_monic_squarefree(&monic) {
        let mut back = IntPoly::zero();
        for (e, c) in m.terms() {
            back.add_term(e, c * lc.pow(e as u32));
        }
        out.push(back.primitive_part());
    }
    out
}

/// Complete factorization over the integers.
pub fn factor_z(f: &IntPoly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = if f.lc_sign() < 0 { -1 } else { 1 };
    let content = f.content();
    let mut prim = f.primitive_part();
    if unit < 0 {
        prim = prim.neg();
    }
    let mut factors: Vec<(IntPoly, u32)> = Vec::new();
    for (part, mult) in yun_squarefree(&prim) {
        for irr in factor_squarefree_primitive(&part) {
            factors.push((irr, mult));
        }
    }
    factors.sort_by(|a, b| a.0.cmp_factor_order(&b.0));
    let out = Factorization { unit, content, factors };
    debug_assert_eq!(out.product(), *f);
    Ok(out)
}

/// True iff f is irreducible over the rationals (one factor, multiplicity 1).
pub fn is_irreducible_z(f: &IntPoly) -> bool {
    match f.degree() {
        None | Some(0) => false,
        Some(1) => true,
        Some(_) => match factor_z(f) {
            Ok(fac) => fac.factors.len() == 1 && fac.factors[0].1 == 1,
            Err(_) => false,
        },
    }
}

/// Distinct irreducible factors (multiplicities dropped).
pub fn distinct_irreducible_factors(f: &IntPoly) -> Result<Vec<IntPoly>> {
    Ok(factor_z(f)?.factors.into_iter().map(|(g, _)| g).collect())
}

/// Exact integer k-th root when it exists.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 0 {
        return None;
    }
    if n.is_negative() && k % 2 == 0 {
        return None;
    }
    let r = n.nth_root(k);
    if r.pow(k) == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> IntPoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn yun_splits_multiplicities() {
        let f = p("x+1").pow(2).mul(&p("x-1")).mul(&p("x^2+x+1").pow(3));
        let parts = yun_squarefree(&f);
        assert_eq!(
            parts,
            vec![(p("x-1"), 1), (p("x+1"), 2), (p("x^2+x+1"), 3)]
        );
    }

    #[test]
    fn factors_product_of_small_irreducibles() {
        let f = p("x^2+1").mul(&p("x^2+x+1")).mul(&p("x-2"));
        let fac = factor_z(&f).unwrap();
        assert_eq!(fac.unit, 1);
        assert_eq!(fac.content, BigInt::one());
        assert_eq!(
            fac.factors,
            vec![(p("x-2"), 1), (p("x^2+1"), 1), (p("x^2+x+1"), 1)]
        );
    }

    #[test]
    fn factors_with_content_sign_and_x_power() {
        let f = p("x+1").mul(&p("x")).mul(&IntPoly::constant(-6));
        let fac = factor_z(&f).unwrap();
        assert_eq!(fac.unit, -1);
        assert_eq!(fac.content, BigInt::from(6));
        assert_eq!(fac.factors, vec![(p("x"), 1), (p("x+1"), 1)]);
        assert_eq!(fac.product(), f);
    }

    #[test]
    fn recombination_is_needed_for_swinnerton_dyer_style_inputs() {
        // x^4 + 1 is irreducible over Z but splits mod every prime.
        assert!(is_irreducible_z(&p("x^4+1")));
        // x^4 + 4 = (x^2-2x+2)(x^2+2x+2).
        let fac = factor_z(&p("x^4+4")).unwrap();
        assert_eq!(
            fac.factors,
            vec![(p("x^2-2*x+2"), 1), (p("x^2+2*x+2"), 1)]
        );
    }

    #[test]
    fn factors_non_monic_inputs() {
        let f = p("2*x+1").mul(&p("3*x^2+x+1")).mul(&p("5*x-7"));
        let fac = factor_z(&f).unwrap();
        assert_eq!(
            fac.factors,
            vec![(p("5*x-7"), 1), (p("2*x+1"), 1), (p("3*x^2+x+1"), 1)]
        );
    }

    #[test]
    fn large_cyclotomic_like_inputs() {
        // x^12 - 1 has the full set of cyclotomic factors.
        let fac = factor_z(&p("x^12-1")).unwrap();
        let degs: Vec<u64> = fac.factors.iter().map(|(f, _)| f.degree().unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 2, 2, 2, 4]);
        assert_eq!(fac.product(), p("x^12-1"));
    }

    #[test]
    fn irreducibility_of_degree_one_and_constants() {
        assert!(is_irreducible_z(&p("7*x-3")));
        assert!(!is_irreducible_z(&p("5")));
        assert!(!is_irreducible_z(&IntPoly::zero()));
        assert!(!is_irreducible_z(&p("x^2-1")));
    }

    #[test]
    fn exact_root_detection() {
        assert_eq!(exact_root(&BigInt::from(243), 5), Some(BigInt::from(3)));
        assert_eq!(exact_root(&BigInt::from(244), 5), None);
        assert_eq!(exact_root(&BigInt::from(-27), 3), Some(BigInt::from(-3)));
        assert_eq!(exact_root(&BigInt::from(-4), 2), None);
        assert_eq!(exact_root(&BigInt::from(49), 2), Some(BigInt::from(7)));
    }
}
