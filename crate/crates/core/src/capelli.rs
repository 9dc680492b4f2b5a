//! Substitution reducibility: given an irreducible F(x,y) = Σ fⱼ(x) yʲ, decide
//! for which n the polynomial F(x,yⁿ) factors.
//!
//! The classification reduces to finitely many checks: F(x,y^p) for the odd
//! primes p up to a degree/height bound, plus the square and quartic cases.
//! Two fast filters discharge most moduli without ever factoring a bivariate
//! polynomial:
//!
//! * a congruence filter: if F(x,y^p) is reducible then every fⱼ must be a
//!   p-th power mod p, which by the Frobenius criterion means every exponent
//!   carrying a non-zero residue coefficient is divisible by p;
//! * a parity filter for the quartic case: when r = 4 or r is odd, a
//!   factorization of F(x,y⁴) that does not already force F(x,y²) to factor
//!   requires 2 | f₀, 2 | f₃ (only for r = 4), or 4 | f_r.
//!
//! A univariate variant decides irreducibility of w(xⁿ) for irreducible w via
//! the rational norm of a root: w(x^p) can only factor when that norm is a
//! p-th power in ℚ, so exact integer root extraction prunes the prime set
//! before any factoring happens.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::gcd::family_is_coprime;
use crate::intpoly::IntPoly;
use crate::modpoly::primes_up_to;
use crate::unifactor::{exact_root, is_irreducible_z};

/// Largest degree/height bound for which the odd-prime set is enumerated.
const PRIME_BOUND_CAP: u64 = 10_000_000;

/// A polynomial family F(x,y) = Σ fⱼ(x) yʲ stored by its coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    f: Vec<IntPoly>,
}

impl FamilySpec {
    /// Builds a family from f₀..f_r; requires a non-empty list with f_r ≠ 0.
    pub fn new(f: Vec<IntPoly>) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::InvalidInput(
                "a polynomial family needs at least one coefficient".into(),
            ));
        }
        if f.last().unwrap().is_zero() {
            return Err(Error::InvalidInput(
                "the top coefficient f_r of a family must be non-zero".into(),
            ));
        }
        Ok(FamilySpec { f })
    }

    /// The y-degree r of the family.
    pub fn r(&self) -> usize {
        self.f.len() - 1
    }

    /// All coefficients f₀..f_r in order.
    pub fn coeffs(&self) -> &[IntPoly] {
        &self.f
    }

    /// The coefficient fⱼ.
    pub fn coeff(&self, j: usize) -> &IntPoly {
        &self.f[j]
    }

    /// True when gcd(f₀, .., f_r) = 1.
    pub fn is_coprime(&self) -> bool {
        family_is_coprime(&self.f)
    }

    /// True when f₀(0) ≠ 0.
    pub fn has_nonzero_constant_base(&self) -> bool {
        !self.f[0].constant_term().is_zero()
    }

    /// True when some fⱼ has positive degree.
    pub fn has_nonconstant_coeff(&self) -> bool {
        self.f.iter().any(|fj| fj.degree().map_or(false, |d| d > 0))
    }

    /// The family as a bivariate polynomial.
    pub fn bi_poly(&self) -> BiPoly {
        BiPoly::new(self.f.clone())
    }

    /// The shifted family with fⱼ replaced by fⱼ·x^(j·t).
    pub fn shift_ascending(&self, t: u64) -> Result<FamilySpec> {
        self.shift_with(|j| (j as u64).checked_mul(t))
    }

    /// The shifted family with fⱼ replaced by fⱼ·x^((r−j)·t).
    pub fn shift_descending(&self, t: u64) -> Result<FamilySpec> {
        let r = self.r() as u64;
        self.shift_with(|j| (r - j as u64).checked_mul(t))
    }

    fn shift_with(&self, exponent: impl Fn(usize) -> Option<u64>) -> Result<FamilySpec> {
        let mut shifted = Vec::with_capacity(self.f.len());
        for (j, fj) in self.f.iter().enumerate() {
            let e = exponent(j).ok_or_else(|| {
                Error::InvalidInput("shift exponent overflows".into())
            })?;
            shifted.push(fj.mul_xpow(e));
        }
        FamilySpec::new(shifted)
    }
}

/// The odd primes that can make some F(x,y^p) reducible, with their bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSet {
    /// All odd primes up to `bound`, ascending.
    pub primes: Vec<u64>,
    /// max over j of max(deg fⱼ, height fⱼ).
    pub bound: u64,
}

/// Computes the odd-prime set for a family: all odd p up to
/// max over j of max(deg fⱼ, H(fⱼ)), zero coefficients skipped.
pub fn prime_set(spec: &FamilySpec) -> Result<PrimeSet> {
    let mut bound_big = BigInt::zero();
    for fj in spec.coeffs() {
        if let Some(d) = fj.degree() {
            bound_big = bound_big.max(BigInt::from(d)).max(fj.height());
        }
    }
    if bound_big > BigInt::from(PRIME_BOUND_CAP) {
        return Err(Error::InvalidInput(format!(
            "prime-set bound {bound_big} exceeds the cap {PRIME_BOUND_CAP}"
        )));
    }
    let bound: u64 = bound_big.try_into().unwrap_or(0);
    let primes = primes_up_to(bound)
        .into_iter()
        .filter(|&p| p != 2)
        .collect();
    Ok(PrimeSet { primes, bound })
}

/// True iff every fⱼ mod p lies in 𝔽_p[x^p], i.e. the congruence
/// F ≡ Σ gⱼ(x)^p yʲ (mod p) can hold.  False proves F(x,y^p) irreducible
/// without factoring (given F itself irreducible with a non-constant fⱼ).
pub fn pth_power_obstruction(spec: &FamilySpec, p: u64) -> bool {
    let modulus = BigInt::from(p);
    for fj in spec.coeffs() {
        for (e, c) in fj.terms() {
            if !(c % &modulus).is_zero() && e % p != 0 {
                return false;
            }
        }
    }
    true
}

/// Whether a factorization of F(x,y⁴) can exist beyond the square case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseIiFilter {
    /// Every route to a quartic-only factorization is closed: the parity
    /// divisibilities fail and the mod-2 congruence fails too.
    RuledOut,
    /// The parity divisibilities fail, so F(x,y⁴) can only factor if
    /// F(x,y²) already does.
    OnlyViaSquare,
    /// A parity divisibility holds; the quartic case needs a direct check.
    NotRuledOut { reason: String },
    /// The filter only covers r = 4 and odd r.
    NotApplicable,
}

/// True when every coefficient of f is divisible by k (the zero polynomial
/// counts as divisible).
fn divisible_by_int(f: &IntPoly, k: u32) -> bool {
    let k = BigInt::from(k);
    f.terms().all(|(_, c)| (c % &k).is_zero())
}

/// Parity filter for the quartic case.  For r = 4 the open routes are
/// 2 | f₀, 2 | f₃, 4 | f₄; for odd r they are 2 | f₀, 4 | f_r.  When all
/// fail, F(x,y⁴) can factor only if F(x,y²) does and the mod-2 congruence
/// holds; if that congruence also fails the quartic case is ruled out.
pub fn case_ii_filter(spec: &FamilySpec) -> CaseIiFilter {
    let r = spec.r();
    let checks: Vec<(usize, u32)> = if r == 4 {
        vec![(0, 2), (3, 2), (4, 4)]
    } else if r % 2 == 1 {
        vec![(0, 2), (r, 4)]
    } else {
        return CaseIiFilter::NotApplicable;
    };
    for (j, k) in checks {
        if divisible_by_int(spec.coeff(j), k) {
            return CaseIiFilter::NotRuledOut {
                reason: format!("f_{j} is divisible by {k}"),
            };
        }
    }
    if pth_power_obstruction(spec, 2) {
        CaseIiFilter::OnlyViaSquare
    } else {
        CaseIiFilter::RuledOut
    }
}

/// Answer of a bivariate irreducibility oracle on one polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    /// Irreducible in ℤ[x,y] up to a power of x and sign.
    Irreducible,
    /// A genuine factorization exists (two factors of positive y-degree,
    /// or a non-unit content).
    Reducible,
    /// The oracle could not decide within its budget.
    Undecided,
}

/// How one modulus m of the substitution grid was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulusOutcome {
    /// The p-th power congruence fails, so F(x,y^m) cannot factor.
    CongruenceObstructed,
    /// Parity filter: the quartic routes are closed and the mod-2
    /// congruence fails, so F(x,y⁴) cannot factor.
    QuarticRouteExcluded,
    /// The quartic case can only factor via the square case, which was
    /// verified irreducible.
    SettledBySquare,
    /// F(x,y²) factors, so F(x,y⁴) factors too.
    ReducibleBySquare,
    /// The oracle verified irreducibility after substitution.
    OracleIrreducible,
    /// The oracle found a factorization after substitution.
    OracleReducible,
    /// The oracle gave up within budget.
    OracleUndecided,
}

impl ModulusOutcome {
    /// True when the outcome establishes a factorization.
    pub fn is_reducible(self) -> bool {
        matches!(
            self,
            ModulusOutcome::ReducibleBySquare | ModulusOutcome::OracleReducible
        )
    }

    /// True when the outcome leaves the modulus unsettled.
    pub fn is_undecided(self) -> bool {
        matches!(self, ModulusOutcome::OracleUndecided)
    }
}

/// One checked modulus: the substituted polynomial and how it was settled.
#[derive(Clone, Debug)]
pub struct ModulusWitness {
    /// The modulus m ∈ P ∪ {2, 4}.
    pub modulus: u64,
    /// F(x, y^m), the polynomial the modulus is about.
    pub poly: BiPoly,
    /// How the modulus was settled.
    pub outcome: ModulusOutcome,
}

/// Final classification of when F(x,yⁿ) is reducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CapelliStatus {
    /// F(x,yⁿ) is irreducible for every positive n.
    IrreducibleForAllN,
    /// F(x,yⁿ) is reducible exactly when some listed modulus divides n.
    ReducibleForNDivisibleBy(Vec<u64>),
    /// The listed moduli could not be settled within budget.
    Undecided(Vec<u64>),
}

/// Classification result with every checked modulus recorded.
#[derive(Clone, Debug)]
pub struct CapelliVerdict {
    /// The overall classification.
    pub status: CapelliStatus,
    /// One entry per checked modulus, ascending.
    pub witnesses: Vec<ModulusWitness>,
    /// Whether F(x,yⁿ) is reducible at the queried n; None if that depends
    /// on an unsettled modulus.
    pub reducible_at_n: Option<bool>,
    /// The queried exponent.
    pub n: u64,
}

/// Classifies reducibility of F(x,yⁿ) for all n by checking the moduli
/// P ∪ {2, 4}.  The oracle is consulted only for moduli the congruence and
/// parity filters cannot discharge.  Requires F(x,y) irreducible (verified
/// through the oracle) and at least one non-constant fⱼ.
pub fn classify_capelli<O>(spec: &FamilySpec, n: u64, oracle: &mut O) -> Result<CapelliVerdict>
where
    O: FnMut(&BiPoly) -> OracleOutcome,
{
    if n == 0 {
        return Err(Error::InvalidInput("the exponent n must be positive".into()));
    }
    if !spec.has_nonconstant_coeff() {
        return Err(Error::HypothesisViolation(
            "the classification needs at least one non-constant coefficient".into(),
        ));
    }
    let base = spec.bi_poly();
    match oracle(&base) {
        OracleOutcome::Irreducible => {}
        OracleOutcome::Reducible => {
            return Err(Error::HypothesisViolation(
                "F(x,y) must be irreducible before substituting".into(),
            ));
        }
        OracleOutcome::Undecided => {
            return Err(Error::InvalidInput(
                "the oracle could not settle the base polynomial".into(),
            ));
        }
    }

    let odd_primes = prime_set(spec)?.primes;
    let cong2 = pth_power_obstruction(spec, 2);

    let square_outcome = if cong2 {
        match oracle(&base.subst_y_pow(2)) {
            OracleOutcome::Irreducible => ModulusOutcome::OracleIrreducible,
            OracleOutcome::Reducible => ModulusOutcome::OracleReducible,
            OracleOutcome::Undecided => ModulusOutcome::OracleUndecided,
        }
    } else {
        ModulusOutcome::CongruenceObstructed
    };

    let quartic_outcome = if square_outcome.is_reducible() {
        ModulusOutcome::ReducibleBySquare
    } else {
        match case_ii_filter(spec) {
            CaseIiFilter::RuledOut => ModulusOutcome::QuarticRouteExcluded,
            CaseIiFilter::OnlyViaSquare
                if square_outcome == ModulusOutcome::OracleIrreducible =>
            {
                ModulusOutcome::SettledBySquare
            }
            _ => match oracle(&base.subst_y_pow(4)) {
                OracleOutcome::Irreducible => ModulusOutcome::OracleIrreducible,
                OracleOutcome::Reducible => ModulusOutcome::OracleReducible,
                OracleOutcome::Undecided => ModulusOutcome::OracleUndecided,
            },
        }
    };

    let mut witnesses = vec![ModulusWitness {
        modulus: 2,
        poly: base.subst_y_pow(2),
        outcome: square_outcome,
    }];
    for &p in &odd_primes {
        let outcome = if pth_power_obstruction(spec, p) {
            match oracle(&base.subst_y_pow(p)) {
                OracleOutcome::Irreducible => ModulusOutcome::OracleIrreducible,
                OracleOutcome::Reducible => ModulusOutcome::OracleReducible,
                OracleOutcome::Undecided => ModulusOutcome::OracleUndecided,
            }
        } else {
            ModulusOutcome::CongruenceObstructed
        };
        witnesses.push(ModulusWitness {
            modulus: p,
            poly: base.subst_y_pow(p),
            outcome,
        });
    }
    witnesses.push(ModulusWitness {
        modulus: 4,
        poly: base.subst_y_pow(4),
        outcome: quartic_outcome,
    });
    witnesses.sort_by_key(|w| w.modulus);

    let reducible: Vec<u64> = witnesses
        .iter()
        .filter(|w| w.outcome.is_reducible())
        .map(|w| w.modulus)
        .collect();
    let undecided: Vec<u64> = witnesses
        .iter()
        .filter(|w| w.outcome.is_undecided())
        .map(|w| w.modulus)
        .collect();

    let reducible_at_n = if reducible.iter().any(|&m| n % m == 0) {
        Some(true)
    } else if undecided.iter().any(|&m| n % m == 0) {
        None
    } else {
        Some(false)
    };
    let status = if !undecided.is_empty() {
        CapelliStatus::Undecided(undecided)
    } else if !reducible.is_empty() {
        CapelliStatus::ReducibleForNDivisibleBy(reducible)
    } else {
        CapelliStatus::IrreducibleForAllN
    };

    Ok(CapelliVerdict {
        status,
        witnesses,
        reducible_at_n,
        n,
    })
}

/// Irreducibility of w(xⁿ) for irreducible univariate w.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnivariateCapelli {
    /// w(xⁿ) is irreducible.
    Irreducible,
    /// w(xⁿ) is reducible: each listed modulus m divides n and w(x^m)
    /// verifiably factors.
    PossiblyReducible {
        /// The moduli (primes dividing n, possibly 4) with w(x^m) reducible.
        witnesses: Vec<u64>,
    },
}

/// The distinct prime factors of n, ascending.
fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            primes.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// True when q is a p-th power in ℚ: numerator and denominator must both be
/// exact p-th powers (sign included, so only odd p admit negatives).
pub fn rational_pth_power(q: &BigRational, p: u32) -> bool {
    exact_root(q.numer(), p).is_some() && exact_root(q.denom(), p).is_some()
}

/// The product of the roots of w over ℚ: (−1)^deg · w(0) / lc(w).
pub fn root_norm(w: &IntPoly) -> Result<BigRational> {
    let d = w
        .degree()
        .ok_or(Error::ZeroPolynomial)
        .and_then(|d| if d == 0 { Err(Error::NotAPolynomialOfPositiveDegree) } else { Ok(d) })?;
    let sign = if d % 2 == 0 { 1 } else { -1 };
    Ok(BigRational::new(
        w.constant_term() * BigInt::from(sign),
        w.leading_coeff(),
    ))
}

/// Decides irreducibility of w(xⁿ).  The norm of a root, ±w(0)/lc(w), must
/// be a p-th power in ℚ for w(x^p) to factor, so only primes p | n passing
/// that test are factored directly; the quartic case w(x⁴) is checked
/// whenever 4 | n.
pub fn univariate_capelli(w: &IntPoly, n: u64) -> Result<UnivariateCapelli> {
    if n == 0 {
        return Err(Error::InvalidInput("the exponent n must be positive".into()));
    }
    if !is_irreducible_z(w) {
        return Err(Error::HypothesisViolation(
            "w must be irreducible over the integers".into(),
        ));
    }
    if w.constant_term().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let norm = root_norm(w)?;

    let mut witnesses = Vec::new();
    for p in distinct_prime_factors(n) {
        if p <= u32::MAX as u64
            && rational_pth_power(&norm, p as u32)
            && !is_irreducible_z(&w.subst_xpow(p))
        {
            witnesses.push(p);
        }
    }
    if n % 4 == 0 && !witnesses.contains(&2) && !is_irreducible_z(&w.subst_xpow(4)) {
        witnesses.push(4);
    }
    witnesses.sort_unstable();
    if witnesses.is_empty() {
        Ok(UnivariateCapelli::Irreducible)
    } else {
        Ok(UnivariateCapelli::PossiblyReducible { witnesses })
    }
}
