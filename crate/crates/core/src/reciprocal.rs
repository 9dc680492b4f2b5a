//! Reciprocal-factor analysis for concrete polynomials and exponent families.
//!
//! A nonzero polynomial is reciprocal when it equals plus or minus its
//! coefficient reversal. This module splits a concrete polynomial into its
//! reciprocal and non-reciprocal parts, and analyzes one-parameter families
//! `F(n) = sum_j u_j(x) * x^(a_j*n + b_j)` symbolically: computing `F - F~`
//! as a family of the same shape, deciding for which `n` a fixed polynomial
//! divides every family member, and ruling out reciprocal irreducible factors
//! of `F(n)` for all large `n` when the difference collapses to a single
//! block.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gcd::remove_factor;
use crate::intpoly::{IntPoly, LaurentPoly};
use crate::unifactor::{factor_z, is_irreducible_z, Factorization};

/// A polynomial split as `reciprocal_part * nonreciprocal_part`.
#[derive(Debug, Clone)]
pub struct ReciprocalSplit {
    /// Unit, content, and every irreducible reciprocal factor (with
    /// multiplicity) of the input.
    pub reciprocal_part: Factorization,
    /// Product of the remaining irreducible factors; primitive with positive
    /// leading coefficient, and none of its irreducible factors is reciprocal.
    pub nonreciprocal_part: IntPoly,
}

/// Classification of a non-reciprocal part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonReciprocalStatus {
    /// The non-reciprocal part is 1.
    Trivial,
    /// The non-reciprocal part is irreducible of positive degree.
    Irreducible,
    /// The non-reciprocal part has at least two irreducible factors.
    Reducible,
}

/// Removes every irreducible reciprocal factor of `f` into a factorization,
/// leaving the product of the non-reciprocal irreducibles.
pub fn split_reciprocal(f: &IntPoly) -> Result<ReciprocalSplit> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.constant_term().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let fac = factor_z(f)?;
    let mut rec = Vec::new();
    let mut nonrec = IntPoly::one();
    for (q, m) in fac.factors {
        if q.is_reciprocal() {
            rec.push((q, m));
        } else {
            nonrec = nonrec.mul(&q.pow(m as u64));
        }
    }
    Ok(ReciprocalSplit {
        reciprocal_part: Factorization {
            unit: fac.unit,
            content: fac.content,
            factors: rec,
        },
        nonreciprocal_part: nonrec,
    })
}

/// The non-reciprocal part of `f`.
pub fn nonreciprocal_part(f: &IntPoly) -> Result<IntPoly> {
    Ok(split_reciprocal(f)?.nonreciprocal_part)
}

/// Classifies the non-reciprocal part of `f` as 1, irreducible, or reducible.
pub fn nonreciprocal_status(f: &IntPoly) -> Result<NonReciprocalStatus> {
    let part = nonreciprocal_part(f)?;
    if part.is_one() {
        Ok(NonReciprocalStatus::Trivial)
    } else if is_irreducible_z(&part) {
        Ok(NonReciprocalStatus::Irreducible)
    } else {
        Ok(NonReciprocalStatus::Reducible)
    }
}

/// One family block `coeff(x) * x^(a*n + b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpBlock {
    pub coeff: IntPoly,
    pub a: i64,
    pub b: i64,
}

impl ExpBlock {
    /// Exponent `a*n + b` at a concrete `n`.
    fn exponent_at(&self, n: i64) -> i64 {
        self.a
            .checked_mul(n)
            .and_then(|e| e.checked_add(self.b))
            .expect("family exponent overflows i64")
    }
}

/// A one-parameter family `F(n) = sum_j coeff_j(x) * x^(a_j*n + b_j)` with
/// distinct non-negative slopes `a_j` and nonzero block coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFamily {
    blocks: Vec<ExpBlock>,
}

impl AffineFamily {
    /// Builds a family from `(coeff, a, b)` triples, merging blocks with equal
    /// slope and dropping blocks that cancel to zero.
    pub fn new(blocks: Vec<(IntPoly, i64, i64)>) -> Result<Self> {
        let mut merged: Vec<ExpBlock> = Vec::new();
        for (coeff, a, b) in blocks {
            if coeff.is_zero() {
                continue;
            }
            if a < 0 {
                return Err(Error::UnsupportedDegreePattern(format!(
                    "negative exponent slope {a}"
                )));
            }
            match merged.iter_mut().find(|blk| blk.a == a) {
                Some(blk) => {
                    let b0 = blk.b.min(b);
                    let merged_coeff = blk
                        .coeff
                        .mul_xpow((blk.b - b0) as u64)
                        .add(&coeff.mul_xpow((b - b0) as u64));
                    blk.coeff = merged_coeff;
                    blk.b = b0;
                }
                None => merged.push(ExpBlock { coeff, a, b }),
            }
        }
        merged.retain(|blk| !blk.coeff.is_zero());
        for blk in &mut merged {
            // A slope-0 block is a fixed polynomial; fold its offset away.
            if blk.a == 0 && blk.b != 0 {
                if blk.b > 0 {
                    blk.coeff = blk.coeff.mul_xpow(blk.b as u64);
                } else {
                    blk.coeff = blk.coeff.div_xpow((-blk.b) as u64).map_err(|_| {
                        Error::UnsupportedDegreePattern(
                            "constant block with negative exponents".into(),
                        )
                    })?;
                }
                blk.b = 0;
            }
        }
        merged.sort_by_key(|blk| blk.a);
        Ok(AffineFamily { blocks: merged })
    }

    /// The canonical blocks, sorted by increasing slope.
    pub fn blocks(&self) -> &[ExpBlock] {
        &self.blocks
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The block of largest slope, which dominates the degree for large `n`.
    pub fn leading_block(&self) -> Option<&ExpBlock> {
        self.blocks.last()
    }

    /// Leading coefficient of `F(n)` for every `n` past the separation
    /// threshold.
    pub fn leading_coeff_large_n(&self) -> BigInt {
        self.leading_block()
            .map(|blk| blk.coeff.leading_coeff())
            .unwrap_or_else(BigInt::zero)
    }

    /// Smallest `n` from which every block exponent `a*n + b` is non-negative.
    pub fn exponent_threshold(&self) -> i64 {
        let mut n0 = 0i64;
        for blk in &self.blocks {
            if blk.a == 0 {
                continue;
            }
            // a*n + b >= 0  <=>  n >= ceil(-b / a)
            n0 = n0.max(Integer::div_ceil(&-blk.b, &blk.a));
        }
        n0
    }

    /// Smallest `n` from which the blocks occupy pairwise disjoint exponent
    /// ranges (so coefficients never interact) and all exponents are
    /// non-negative.
    pub fn separation_threshold(&self) -> i64 {
        let mut n0 = self.exponent_threshold();
        for (i, lo) in self.blocks.iter().enumerate() {
            for hi in &self.blocks[i + 1..] {
                // hi has the larger slope; require its lowest exponent to
                // exceed lo's highest: (hi.a - lo.a)*n > lo.b + deg(lo) - hi.b.
                let gap = lo.b + lo.coeff.degree().unwrap() as i64 - hi.b;
                let n_need = Integer::div_floor(&gap, &(hi.a - lo.a)) + 1;
                n0 = n0.max(n_need);
            }
        }
        n0
    }

    /// The family member at a concrete `n`, as a Laurent polynomial.
    pub fn eval_laurent(&self, n: i64) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for blk in &self.blocks {
            let e = blk.exponent_at(n);
            for (k, c) in blk.coeff.terms() {
                out.add_term(e + k as i64, c.clone());
            }
        }
        out
    }

    /// The family member at a concrete `n`; errors when some exponent is
    /// still negative at this `n`.
    pub fn eval(&self, n: i64) -> Result<IntPoly> {
        let mut out = IntPoly::zero();
        for blk in &self.blocks {
            let e = blk.exponent_at(n);
            if e < 0 {
                return Err(Error::NegativeExponent);
            }
            out = out.add(&blk.coeff.mul_xpow(e as u64));
        }
        Ok(out)
    }

    /// Blockwise negation.
    fn neg(&self) -> AffineFamily {
        AffineFamily {
            blocks: self
                .blocks
                .iter()
                .map(|blk| ExpBlock {
                    coeff: blk.coeff.neg(),
                    a: blk.a,
                    b: blk.b,
                })
                .collect(),
        }
    }

    /// Blockwise sum of two families over the same parameter.
    fn add(&self, other: &AffineFamily) -> Result<AffineFamily> {
        let mut blocks: Vec<(IntPoly, i64, i64)> = Vec::new();
        for blk in self.blocks.iter().chain(other.blocks.iter()) {
            blocks.push((blk.coeff.clone(), blk.a, blk.b));
        }
        AffineFamily::new(blocks)
    }
}

/// Shape of the family difference `F - F~`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TildeCollapse {
    /// `F(n) = F~(n)` for every `n` past the threshold.
    ZeroDifference,
    /// `F(n) = -F~(n)` for every `n` past the threshold.
    ZeroSum,
    /// The difference is a single block `coeff(x) * x^(a*n + b)`.
    SingleBlock { coeff: IntPoly, a: i64, b: i64 },
    /// The difference has two or more blocks.
    MultiBlock,
}

/// The family difference `F - F~`, valid for all `n >= n_min`.
#[derive(Debug, Clone)]
pub struct TildeDifference {
    /// Blocks of `F - F~` in the same representation as the input family.
    pub difference: AffineFamily,
    pub collapse: TildeCollapse,
    /// Threshold from which the symbolic difference equals the concrete one.
    pub n_min: i64,
}

/// Computes the coefficient reversal of the whole family and returns `F - F~`
/// as a family, detecting collapse to zero or a single block.
pub fn family_tilde_difference(family: &AffineFamily) -> Result<TildeDifference> {
    let top = family.leading_block().ok_or_else(|| {
        Error::UnsupportedDegreePattern("empty family has no degree".into())
    })?;
    // For large n the degree of F(n) is s*n + c, governed by the top block.
    let s = top.a;
    let c = top.b + top.coeff.degree().unwrap() as i64;
    // Reversal maps a block u(x)*x^(a*n+b) of F to the block of its own
    // coefficient reversal at exponent (s-a)*n + (c - b - deg u).
    let tilde = AffineFamily::new(
        family
            .blocks()
            .iter()
            .map(|blk| {
                (
                    blk.coeff.reciprocal(),
                    s - blk.a,
                    c - blk.b - blk.coeff.degree().unwrap() as i64,
                )
            })
            .collect(),
    )?;
    let difference = family.add(&tilde.neg())?;
    let n_min = family
        .separation_threshold()
        .max(tilde.separation_threshold());
    let collapse = if difference.is_empty() {
        TildeCollapse::ZeroDifference
    } else if family.add(&tilde)?.is_empty() {
        TildeCollapse::ZeroSum
    } else if difference.blocks().len() == 1 {
        let blk = &difference.blocks()[0];
        TildeCollapse::SingleBlock {
            coeff: blk.coeff.clone(),
            a: blk.a,
            b: blk.b,
        }
    } else {
        TildeCollapse::MultiBlock
    };
    Ok(TildeDifference {
        difference,
        collapse,
        n_min,
    })
}

/// For which `n` a fixed polynomial divides every family member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyDivisibility {
    /// Divides `F(n)` for every `n` past the exponent threshold.
    All,
    /// Divides `F(n)` exactly when `n mod period` lies in `residues`, for
    /// every `n` past the exponent threshold. An empty residue set means the
    /// divisor never divides past the threshold.
    Periodic { period: u64, residues: Vec<u64> },
    /// Divides `F(n)` for at most finitely many `n`, with no explicit bound.
    FinitelyMany,
}

/// Remainder of `f` modulo a monic divisor of positive degree.
fn rem_monic(f: &IntPoly, m: &IntPoly) -> IntPoly {
    let dm = m.degree().unwrap();
    let mut r = f.clone();
    while let Some(dr) = r.degree() {
        if dr < dm {
            break;
        }
        let c = r.leading_coeff();
        r = r.sub(&m.mul_xpow(dr - dm).mul_scalar(&c));
    }
    r
}

/// Least `k` with `q | x^k - 1` for an irreducible primitive `q` with positive
/// leading coefficient, or None when the roots of `q` are not roots of unity.
fn root_of_unity_order(q: &IntPoly) -> Option<u64> {
    if !q.leading_coeff().is_one() {
        // Monic divisors of x^k - 1 only.
        return None;
    }
    let d = q.degree().unwrap();
    // If q | x^k - 1 then d = phi(j) for some j | k, and phi(j) >= sqrt(j/2)
    // bounds the least such k by 2d^2.
    let cap = 2 * d * d + 1;
    let mut cur = rem_monic(&IntPoly::x(), q);
    for k in 1..=cap {
        if k > 1 {
            cur = rem_monic(&cur.mul(&IntPoly::x()), q);
        }
        if cur.is_one() {
            return Some(k);
        }
    }
    None
}

/// Shrinks a divisibility pattern `(period, residues)` to its least period.
fn reduce_period(period: u64, residues: &[u64]) -> (u64, Vec<u64>) {
    let member: Vec<bool> = {
        let mut v = vec![false; period as usize];
        for &r in residues {
            v[r as usize] = true;
        }
        v
    };
    for d in 1..=period {
        if period % d != 0 {
            continue;
        }
        let consistent = (0..period).all(|c| member[c as usize] == member[(c % d) as usize]);
        if consistent {
            let reduced = (0..d).filter(|&c| member[c as usize]).collect();
            return (d, reduced);
        }
    }
    (period, residues.to_vec())
}

/// Divisibility pattern of one irreducible `q` that misses at least one
/// block of the family.
fn irreducible_divisibility(q: &IntPoly, family: &AffineFamily) -> Result<FamilyDivisibility> {
    let m = match root_of_unity_order(q) {
        // Some root of q is neither 0 nor a root of unity, and q misses at
        // least one block, so the family values divisible by q form a finite
        // set (the values form a non-degenerate linear recurrence at that
        // root, which vanishes only finitely often).
        None => return Ok(FamilyDivisibility::FinitelyMany),
        Some(k) => k,
    };
    // q | x^m - 1, so x^e = x^(e mod m) modulo q once all exponents are
    // non-negative, and divisibility of F(n) depends only on n mod m.
    let mut residues = Vec::new();
    for c in 0..m {
        let mut t = IntPoly::zero();
        for blk in family.blocks() {
            let e = (blk.a as i128 * c as i128 + blk.b as i128).mod_floor(&(m as i128)) as u64;
            t = t.add(&blk.coeff.mul_xpow(e));
        }
        if q.divides(&t) {
            residues.push(c);
        }
    }
    let (period, residues) = reduce_period(m, &residues);
    Ok(FamilyDivisibility::Periodic { period, residues })
}

/// Intersects per-factor divisibility patterns (a product divides iff every
/// coprime factor power does).
fn combine_patterns(parts: Vec<FamilyDivisibility>) -> Result<FamilyDivisibility> {
    let mut periodic: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut finitely_many = false;
    for part in parts {
        match part {
            FamilyDivisibility::All => {}
            FamilyDivisibility::FinitelyMany => finitely_many = true,
            FamilyDivisibility::Periodic { period, residues } => {
                if residues.is_empty() {
                    return Ok(FamilyDivisibility::Periodic {
                        period: 1,
                        residues: Vec::new(),
                    });
                }
                periodic.push((period, residues));
            }
        }
    }
    if finitely_many {
        return Ok(FamilyDivisibility::FinitelyMany);
    }
    if periodic.is_empty() {
        return Ok(FamilyDivisibility::All);
    }
    let mut lcm = 1u64;
    for (p, _) in &periodic {
        lcm = lcm.lcm(p);
        if lcm > 1_000_000 {
            return Err(Error::InvalidInput(
                "combined divisibility period exceeds 10^6".into(),
            ));
        }
    }
    let residues: Vec<u64> = (0..lcm)
        .filter(|c| {
            periodic
                .iter()
                .all(|(p, rs)| rs.contains(&(c % p)))
        })
        .collect();
    let (period, residues) = reduce_period(lcm, &residues);
    Ok(FamilyDivisibility::Periodic { period, residues })
}

/// Determines exactly for which large `n` the polynomial `u` divides `F(n)`.
pub fn family_divides(u: &IntPoly, family: &AffineFamily) -> Result<FamilyDivisibility> {
    if u.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if u.constant_term().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    if u.is_one() || u.neg().is_one() {
        return Err(Error::InvalidInput("divisor must not be a unit".into()));
    }
    if family.is_empty() {
        return Ok(FamilyDivisibility::All);
    }
    if family.blocks().iter().all(|blk| u.divides(&blk.coeff)) {
        return Ok(FamilyDivisibility::All);
    }
    // Constant divisors: past the separation threshold the coefficients of
    // F(n) are exactly the block coefficients, so divisibility is blockwise.
    if u.degree() == Some(0) {
        return Ok(FamilyDivisibility::FinitelyMany);
    }
    let fac = factor_z(u)?;
    let mut parts = Vec::new();
    if !fac.content.is_one() {
        // The primitive part may divide periodically, but whether the content
        // divides the cofactor is not periodic in n; only a definite "no" is
        // decidable here.
        let pp_pattern = family_divides(&u.primitive_part(), family)?;
        return match pp_pattern {
            FamilyDivisibility::FinitelyMany => Ok(FamilyDivisibility::FinitelyMany),
            FamilyDivisibility::Periodic { period, residues } if residues.is_empty() => {
                Ok(FamilyDivisibility::Periodic { period, residues })
            }
            _ => Err(Error::InvalidInput(
                "divisibility by an imprimitive polynomial is only decided when its primitive part rules it out"
                    .into(),
            )),
        };
    }
    for (q, e) in &fac.factors {
        let common = family
            .blocks()
            .iter()
            .map(|blk| remove_factor(&blk.coeff, q).0)
            .min()
            .unwrap_or(0);
        if common >= *e {
            parts.push(FamilyDivisibility::All);
            continue;
        }
        if *e - common >= 2 {
            return Err(Error::InvalidInput(
                "repeated factor beyond the blockwise multiplicity is not periodic in n".into(),
            ));
        }
        let stripped = AffineFamily::new(
            family
                .blocks()
                .iter()
                .map(|blk| {
                    let (m, cof) = remove_factor(&blk.coeff, q);
                    (cof.mul(&q.pow((m - common) as u64)), blk.a, blk.b)
                })
                .collect(),
        )?;
        parts.push(irreducible_divisibility(q, &stripped)?);
    }
    combine_patterns(parts)
}

/// How one candidate reciprocal irreducible factor was ruled out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateExclusion {
    /// Divides no family member past the threshold (empty residue pattern).
    EmptyResidues { period: u64 },
    /// Divides at most finitely many family members.
    FinitelyManyN,
    /// Its leading coefficient does not divide the family's leading
    /// coefficient, so it divides no member at all.
    LeadingCoefficient,
}

/// Outcome for one irreducible factor of the collapsed difference block.
#[derive(Debug, Clone)]
pub struct CandidateRecord {
    pub factor: IntPoly,
    pub is_reciprocal: bool,
    /// None when the factor is not reciprocal (no exclusion needed) or when
    /// exclusion failed.
    pub exclusion: Option<CandidateExclusion>,
}

/// Family-level conclusion about reciprocal irreducible factors.
#[derive(Debug, Clone)]
pub enum FamilyReciprocalAnalysis {
    /// `F(n) = sign * F~(n)` identically for large `n`: the family member is
    /// itself reciprocal at every large `n`.
    FamilyReciprocal { sign: i8 },
    /// Every candidate was excluded: `F(n)` has no reciprocal irreducible
    /// factor for all sufficiently large `n`.
    NoReciprocalFactors {
        block: ExpBlock,
        candidates: Vec<CandidateRecord>,
        /// Explicit threshold when every exclusion is effective; None when a
        /// finiteness argument without explicit bound was used.
        effective_from: Option<i64>,
    },
    /// The difference did not collapse, or some candidate survived.
    Inconclusive {
        reason: String,
        candidates: Vec<CandidateRecord>,
    },
}

/// Rules out reciprocal irreducible factors of every large-`n` family member,
/// or reports why it cannot.
///
/// Any reciprocal irreducible factor of `F(n)` also divides the reversal
/// `F~(n)`, hence divides `F(n) - F~(n)`. When that difference collapses to a
/// single block `u(x) * x^(a*n+b)`, the candidates are exactly the reciprocal
/// irreducible factors of `u`, and each is excluded by an empty divisibility
/// pattern or by leading-coefficient arithmetic.
pub fn analyze_family_reciprocal(family: &AffineFamily) -> Result<FamilyReciprocalAnalysis> {
    let diff = family_tilde_difference(family)?;
    let (u, _a, _b) = match diff.collapse {
        TildeCollapse::ZeroDifference => {
            return Ok(FamilyReciprocalAnalysis::FamilyReciprocal { sign: 1 })
        }
        TildeCollapse::ZeroSum => {
            return Ok(FamilyReciprocalAnalysis::FamilyReciprocal { sign: -1 })
        }
        TildeCollapse::SingleBlock { coeff, a, b } => (coeff, a, b),
        TildeCollapse::MultiBlock => {
            return Ok(FamilyReciprocalAnalysis::Inconclusive {
                reason: format!(
                    "difference of the family and its reversal has {} blocks; only a single-block collapse is handled",
                    diff.difference.blocks().len()
                ),
                candidates: Vec::new(),
            })
        }
    };
    let lc_family = family.leading_coeff_large_n();
    let mut candidates = Vec::new();
    let mut all_excluded = true;
    let mut effective_from = Some(family.separation_threshold().max(diff.n_min));
    for (q, _m) in factor_z(&u)?.factors {
        if !q.is_reciprocal() {
            candidates.push(CandidateRecord {
                factor: q,
                is_reciprocal: false,
                exclusion: None,
            });
            continue;
        }
        // Cheap arithmetic exclusion first: lc(q) must divide lc(F(n)).
        if !lc_family.is_multiple_of(&q.leading_coeff()) {
            candidates.push(CandidateRecord {
                factor: q,
                is_reciprocal: true,
                exclusion: Some(CandidateExclusion::LeadingCoefficient),
            });
            continue;
        }
        let pattern = family_divides(&q, family)?;
        let exclusion = match &pattern {
            FamilyDivisibility::Periodic { period, residues } if residues.is_empty() => {
                Some(CandidateExclusion::EmptyResidues { period: *period })
            }
            FamilyDivisibility::FinitelyMany => {
                effective_from = None;
                Some(CandidateExclusion::FinitelyManyN)
            }
            _ => None,
        };
        if exclusion.is_none() {
            all_excluded = false;
        }
        candidates.push(CandidateRecord {
            factor: q,
            is_reciprocal: true,
            exclusion,
        });
    }
    if all_excluded {
        let blk = match diff.difference.blocks() {
            [blk] => blk.clone(),
            _ => unreachable!("single-block collapse"),
        };
        Ok(FamilyReciprocalAnalysis::NoReciprocalFactors {
            block: blk,
            candidates,
            effective_from,
        })
    } else {
        Ok(FamilyReciprocalAnalysis::Inconclusive {
            reason: "a reciprocal factor of the collapsed difference block could not be excluded"
                .into(),
            candidates,
        })
    }
}
