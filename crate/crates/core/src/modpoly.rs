//! Dense polynomial arithmetic over a prime field F_p and factorization mod p.
//!
//! Primes fit in u64 (arithmetic goes through u128), which is far more than
//! the small odd primes this library ever selects.  Factorization follows the
//! classical route: squarefree split, distinct-degree split, then randomized
//! equal-degree splitting with a deterministic final ordering.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::intpoly::IntPoly;

/// Dense polynomial over F_p; `c[i]` is the coefficient of `x^i`, trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModPoly {
    p: u64,
    c: Vec<u64>,
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

impl ModPoly {
    pub fn zero(p: u64) -> Self {
        ModPoly { p, c: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        ModPoly { p, c: vec![1] }
    }

    pub fn x(p: u64) -> Self {
        ModPoly { p, c: vec![0, 1] }
    }

    pub fn from_coeffs(p: u64, mut c: Vec<u64>) -> Self {
        for v in c.iter_mut() {
            *v %= p;
        }
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    /// Reduce an integer polynomial mod p (degree may drop).
    pub fn from_int_poly(f: &IntPoly, p: u64) -> Self {
        let deg = match f.degree() {
            None => return ModPoly::zero(p),
            Some(d) => d as usize,
        };
        let pb = BigInt::from(p);
        let mut c = vec![0u64; deg + 1];
        for (e, a) in f.terms() {
            let r = ((a % &pb) + &pb) % &pb;
            c[e as usize] = r.to_u64().unwrap();
        }
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lc(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn monic(&self) -> ModPoly {
        if self.is_zero() || self.lc() == 1 {
            return self.clone();
        }
        self.mul_scalar(invm(self.lc(), self.p))
    }

    pub fn add(&self, other: &ModPoly) -> ModPoly {
        let p = self.p;
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0u64; n];
        for (i, v) in c.iter_mut().enumerate() {
            *v = addm(self.coeff(i), other.coeff(i), p);
        }
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    pub fn sub(&self, other: &ModPoly) -> ModPoly {
        let p = self.p;
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0u64; n];
        for (i, v) in c.iter_mut().enumerate() {
            *v = subm(self.coeff(i), other.coeff(i), p);
        }
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    pub fn mul(&self, other: &ModPoly) -> ModPoly {
        let p = self.p;
        if self.is_zero() || other.is_zero() {
            return ModPoly::zero(p);
        }
        let mut acc = vec![0u128; self.c.len() + other.c.len() - 1];
        let cap = (u128::MAX - (p as u128 - 1) * (p as u128 - 1)) as u128;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                let t = &mut acc[i + j];
                *t += a as u128 * b as u128;
                if *t >= cap {
                    *t %= p as u128;
                }
            }
        }
        let c = acc.into_iter().map(|v| (v % p as u128) as u64).collect();
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    pub fn mul_scalar(&self, s: u64) -> ModPoly {
        let p = self.p;
        let s = s % p;
        if s == 0 {
            return ModPoly::zero(p);
        }
        let c = self.c.iter().map(|&a| mulm(a, s, p)).collect();
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    pub fn divrem(&self, d: &ModPoly) -> (ModPoly, ModPoly) {
        let p = self.p;
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let inv = invm(d.lc(), p);
        let mut r = self.c.clone();
        let mut q = vec![0u64; self.c.len().saturating_sub(dd)];
        while r.len() > dd {
            let lead = *r.last().unwrap();
            let pos = r.len() - 1 - dd;
            if lead != 0 {
                let f = mulm(lead, inv, p);
                q[pos] = f;
                for (i, &dc) in d.c.iter().enumerate() {
                    r[pos + i] = subm(r[pos + i], mulm(f, dc, p), p);
                }
            }
            r.pop();
        }
        let mut qq = ModPoly { p, c: q };
        qq.trim();
        let mut rr = ModPoly { p, c: r };
        rr.trim();
        (qq, rr)
    }

    pub fn rem(&self, d: &ModPoly) -> ModPoly {
        self.divrem(d).1
    }

    pub fn gcd(&self, other: &ModPoly) -> ModPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns monic g and (s, t) with s*self + t*other = g.
    pub fn xgcd(&self, other: &ModPoly) -> (ModPoly, ModPoly, ModPoly) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (ModPoly::one(p), ModPoly::zero(p));
        let (mut t0, mut t1) = (ModPoly::zero(p), ModPoly::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = invm(r0.lc(), p);
        (r0.mul_scalar(inv), s0.mul_scalar(inv), t0.mul_scalar(inv))
    }

    pub fn derivative(&self) -> ModPoly {
        let p = self.p;
        if self.c.len() <= 1 {
            return ModPoly::zero(p);
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, &a)| mulm(a, (i as u64 + 1) % p, p))
            .collect();
        let mut out = ModPoly { p, c };
        out.trim();
        out
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for &a in self.c.iter().rev() {
            acc = addm(mulm(acc, x % p, p), a, p);
        }
        acc
    }

    /// `self^e mod m` with an arbitrary-precision exponent.
    pub fn powmod(&self, e: &BigInt, m: &ModPoly) -> ModPoly {
        let mut acc = ModPoly::one(self.p);
        let mut base = self.rem(m);
        let (_, bytes) = e.to_bytes_le();
        for (byte_idx, byte) in bytes.iter().enumerate() {
            for bit in 0..8 {
                if byte & (1 << bit) != 0 {
                    acc = acc.mul(&base).rem(m);
                }
                let last = byte_idx == bytes.len() - 1 && (byte >> bit) >> 1 == 0;
                if !last {
                    base = base.mul(&base).rem(m);
                }
            }
        }
        if e.is_zero() {
            acc = ModPoly::one(self.p).rem(m);
        }
        acc
    }

    /// Deterministic ordering: degree, then coefficients from x^0 up.
    pub fn cmp_order(&self, other: &ModPoly) -> std::cmp::Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.cmp(&other.c))
    }
}

/// p-th root of a polynomial all of whose exponents are multiples of p
/// (scalars are their own p-th roots in F_p).
fn pth_root(f: &ModPoly) -> ModPoly {
    let p = f.p as usize;
    let mut c = Vec::with_capacity(f.c.len() / p + 1);
    let mut i = 0;
    while i < f.c.len() {
        c.push(f.c[i]);
        i += p;
    }
    let mut out = ModPoly { p: f.p, c };
    out.trim();
    out
}

/// Squarefree decomposition of a monic polynomial mod p: list of
/// (squarefree monic part, multiplicity).
pub fn squarefree_decomposition(f: &ModPoly) -> Vec<(ModPoly, u32)> {
    let p = f.modulus();
    let mut out: Vec<(ModPoly, u32)> = Vec::new();
    let mut stack = vec![(f.monic(), 1u32)];
    while let Some((f, mult)) = stack.pop() {
        if f.degree().unwrap_or(0) == 0 {
            continue;
        }
        let d = f.derivative();
        if d.is_zero() {
            // f is a p-th power; recurse on its p-th root.
            stack.push((pth_root(&f), mult * p as u32));
            continue;
        }
        let mut g = f.gcd(&d);
        let mut w = f.divrem(&g).0;
        let mut i = 1u32;
        while w.degree().unwrap_or(0) > 0 {
            let y = w.gcd(&g);
            let z = w.divrem(&y).0;
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, mult * i));
            }
            g = g.divrem(&y).0;
            w = y;
            i += 1;
        }
        if g.degree().unwrap_or(0) > 0 {
            stack.push((g, mult * p as u32));
        }
    }
    out
}

/// Distinct-degree split of a squarefree monic polynomial: pairs
/// (degree d, product of all irreducible factors of degree d).
pub fn distinct_degree_split(f: &ModPoly) -> Vec<(usize, ModPoly)> {
    let p = f.modulus();
    let mut f = f.monic();
    let mut out = Vec::new();
    let mut h = ModPoly::x(p);
    let mut d = 0usize;
    while f.degree().unwrap_or(0) > 0 {
        d += 1;
        if 2 * d > f.degree().unwrap() {
            out.push((f.degree().unwrap(), f.clone()));
            break;
        }
        h = h.powmod(&BigInt::from(p), &f);
        let g = f.gcd(&h.sub(&ModPoly::x(p)));
        if g.degree().unwrap_or(0) > 0 {
            out.push((d, g.clone()));
            f = f.divrem(&g).0;
            h = h.rem(&f);
        }
    }
    out
}

/// Split a product of distinct monic irreducibles, all of degree d.
pub fn equal_degree_split(f: &ModPoly, d: usize, rng: &mut impl Rng) -> Vec<ModPoly> {
    let p = f.modulus();
    let n = f.degree().unwrap_or(0);
    if n == d {
        return vec![f.monic()];
    }
    let mut out = Vec::new();
    let mut stack = vec![f.monic()];
    while let Some(g) = stack.pop() {
        let ng = g.degree().unwrap();
        if ng == d {
            out.push(g);
            continue;
        }
        // Try random elements until a proper splitter appears.
        loop {
            let a = ModPoly::from_coeffs(
                p,
                (0..ng).map(|_| rng.gen_range(0..p)).collect(),
            );
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let mut h = a.gcd(&g);
            if h.degree().unwrap_or(0) == 0 || h.degree() == g.degree() {
                h = if p == 2 {
                    // Trace map splitter in characteristic 2.
                    let mut t = a.clone();
                    let mut sq = a.clone();
                    for _ in 1..d {
                        sq = sq.mul(&sq).rem(&g);
                        t = t.add(&sq);
                    }
                    t.gcd(&g)
                } else {
                    let e = (BigInt::from(p).pow(d as u32) - 1) / 2;
                    let b = a.powmod(&e, &g);
                    b.sub(&ModPoly::one(p)).gcd(&g)
                };
            }
            let dh = h.degree().unwrap_or(0);
            if dh > 0 && dh < ng {
                let other = g.divrem(&h).0;
                stack.push(h);
                stack.push(other);
                break;
            }
        }
    }
    out
}

/// All distinct monic irreducible factors of a squarefree monic polynomial,
/// sorted deterministically.
pub fn factor_squarefree_monic(f: &ModPoly, rng: &mut impl Rng) -> Vec<ModPoly> {
    let mut out = Vec::new();
    for (d, g) in distinct_degree_split(f) {
        out.extend(equal_degree_split(&g, d, rng));
    }
    out.sort_by(|a, b| a.cmp_order(b));
    out
}

/// Full factorization mod p: monic irreducible factors with multiplicities,
/// sorted deterministically.  The leading coefficient is dropped.
pub fn factor_mod_p(f: &ModPoly, rng: &mut impl Rng) -> Vec<(ModPoly, u32)> {
    let mut out: Vec<(ModPoly, u32)> = Vec::new();
    for (sqf, mult) in squarefree_decomposition(f) {
        for g in factor_squarefree_monic(&sqf, rng) {
            out.push((g, mult));
        }
    }
    out.sort_by(|a, b| a.0.cmp_order(&b.0));
    out
}

/// All primes up to and including `n`, by sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &ok)| if ok { Some(i as u64) } else { None })
        .collect()
}

/// True iff f mod p is squarefree of the same degree as f.
pub fn reduction_is_squarefree(f: &IntPoly, p: u64) -> bool {
    let fp = ModPoly::from_int_poly(f, p);
    if fp.degree().map(|d| d as u64) != f.degree() {
        return false;
    }
    fp.gcd(&fp.derivative()).degree() == Some(0)
}
