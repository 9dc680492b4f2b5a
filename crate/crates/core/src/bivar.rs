//! Bivariate irreducibility up to powers of x, by two independent routes.
//!
//! The first route is an evaluation certificate: count integer points k where
//! W(x,k) is primitive and irreducible in ℤ[x].  If W = U·V were a genuine
//! factorization, each counted point would force U(x,k) = ±1 or V(x,k) = ±1;
//! since U² − 1 and V² − 1 have at most 2·deg_y U and 2·deg_y V roots in y
//! over ℚ(x), seeing 2·deg_y W + 1 counted points is a contradiction.
//!
//! The second route is a desk-scale oracle: specialize x to one integer ξ
//! larger than twice a factor-coefficient bound, factor the specialization in
//! y over ℤ, and try to lift each sub-multiset of its factors back to a
//! bivariate factor by reading x-coefficients off balanced base-ξ digits.
//! Every candidate is verified by exact division, so Factored answers are
//! exact and Irreducible answers mean the full enumeration was exhausted.
//!
//! A shift reducer maps twisted family members to their residue-class
//! representatives: multiplying fⱼ by x^(j·t) (or x^((r−j)·t)) and then
//! substituting y^m only depends on t mod m, up to an explicit power of x
//! and an invertible substitution y ↦ x^±q·y.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::bipoly::BiPoly;
use crate::capelli::{FamilySpec, OracleOutcome};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;
use crate::unifactor::{factor_z, is_irreducible_z};

/// A bivariate polynomial split as x^xpow · core with x ∤ core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrippedBiPoly {
    /// The exponent of the removed power of x.
    pub xpow: u64,
    /// The remaining polynomial; some y-coefficient has a non-zero
    /// constant term.
    pub core: BiPoly,
}

/// Removes the largest power of x dividing every coefficient.
pub fn strip_x(f: &BiPoly) -> Result<StrippedBiPoly> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (core, xpow) = f.strip_x();
    Ok(StrippedBiPoly { xpow, core })
}

/// What happened at one evaluation point of the certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointOutcome {
    /// W(x,k) is primitive and irreducible: the point counts.
    Counted,
    /// W(x,k) has non-unit integer content.
    Imprimitive,
    /// W(x,k) factors over the integers.
    ReducibleHere,
    /// W(x,k) is constant (or zero): no information.
    Degenerate,
}

/// The per-point record behind an evaluation-certificate verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationCertificate {
    /// y-degree of the certified polynomial.
    pub deg_y: u64,
    /// Counted points needed for a conclusive certificate: 2·deg_y + 1.
    pub required: usize,
    /// Counted points found.
    pub counted: usize,
    /// Every point visited, in order, with its outcome.
    pub points: Vec<(i64, PointOutcome)>,
}

/// Outcome of the evaluation-certificate route.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VandermondeVerdict {
    /// Enough counted points: W is irreducible in ℤ[x,y].
    Irreducible(EvaluationCertificate),
    /// The point budget ran out first.
    Inconclusive(EvaluationCertificate),
}

/// Counted points needed to certify a polynomial of y-degree d.
pub fn required_points(d: u64) -> usize {
    (2 * d + 1) as usize
}

/// The default point budget: k = 2, 3, 4, … ascending.
pub fn ascending_points(count: usize) -> Vec<i64> {
    (2..).take(count).collect()
}

/// Certifies irreducibility of W in ℤ[x,y] by counting evaluation points
/// where W(x,k) is primitive and irreducible.  Requires x ∤ W, unit
/// y-content, and deg_y ≥ 2.
pub fn vandermonde_irreducible(w: &BiPoly, points: &[i64]) -> Result<VandermondeVerdict> {
    if w.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = w.deg_y().unwrap_or(0);
    if d < 2 {
        return Err(Error::InvalidInput(
            "the evaluation certificate needs y-degree at least 2".into(),
        ));
    }
    if w.strip_x().1 != 0 {
        return Err(Error::ShapeMismatch(
            "the polynomial is divisible by x; strip x-powers first".into(),
        ));
    }
    if w.content_y().degree() != Some(0) || !w.content_int().is_one() {
        return Err(Error::ShapeMismatch(
            "the polynomial has non-unit content in y".into(),
        ));
    }
    let required = required_points(d);
    let mut cert = EvaluationCertificate {
        deg_y: d,
        required,
        counted: 0,
        points: Vec::new(),
    };
    for &k in points {
        let wk = w.eval_y(&BigInt::from(k));
        let outcome = match wk.degree() {
            None | Some(0) => PointOutcome::Degenerate,
            Some(_) if !wk.content().is_one() => PointOutcome::Imprimitive,
            Some(_) if is_irreducible_z(&wk) => PointOutcome::Counted,
            Some(_) => PointOutcome::ReducibleHere,
        };
        if outcome == PointOutcome::Counted {
            cert.counted += 1;
        }
        cert.points.push((k, outcome));
        if cert.counted >= required {
            return Ok(VandermondeVerdict::Irreducible(cert));
        }
    }
    Ok(VandermondeVerdict::Inconclusive(cert))
}

/// Budget knobs for the reconstruction oracle.
#[derive(Clone, Debug)]
pub struct OracleBudget {
    /// Candidate factors tried (digit reconstructions + trial divisions).
    pub max_candidates: u64,
    /// Specialization points skipped while looking for usable ones.
    pub max_point_retries: u32,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_candidates: 200_000,
            max_point_retries: 8,
        }
    }
}

/// The oracle's answer about the x-stripped core.
#[derive(Clone, Debug)]
pub enum OracleVerdict {
    /// The core is irreducible in ℤ[x,y] (every candidate split failed).
    Irreducible,
    /// An exact factorization core = U·V; re-multiplication verified.
    Factored(BiPoly, BiPoly),
    /// The budget ran out or a sub-step resisted; reason recorded.
    Inconclusive(String),
}

/// Oracle result: the stripped x-power plus the verdict about the core.
#[derive(Clone, Debug)]
pub struct OracleReport {
    /// Power of x removed from the input before testing.
    pub xpow: u64,
    /// Verdict about the x-stripped core.
    pub verdict: OracleVerdict,
}

impl OracleReport {
    /// Collapses the report to the three-way outcome the classifier consumes.
    pub fn outcome(&self) -> OracleOutcome {
        match self.verdict {
            OracleVerdict::Irreducible => OracleOutcome::Irreducible,
            OracleVerdict::Factored(_, _) => OracleOutcome::Reducible,
            OracleVerdict::Inconclusive(_) => OracleOutcome::Undecided,
        }
    }
}

/// Ceiling of the square root of a non-negative integer.
fn sqrt_ceil(n: &BigInt) -> BigInt {
    let s = n.sqrt();
    if &s * &s == *n {
        s
    } else {
        s + 1
    }
}

/// Divides every integer coefficient by c (must divide exactly).
fn div_int(f: &BiPoly, c: &BigInt) -> BiPoly {
    BiPoly::new(
        f.ycoeffs()
            .iter()
            .map(|g| IntPoly::from_terms(g.terms().map(|(e, a)| (e, a / c))))
            .collect(),
    )
}

/// All positive divisors of c (ascending), or None when c cannot be fully
/// factored by trial division or has too many divisors.
fn bounded_divisors(c: &BigInt, cap: usize) -> Option<Vec<BigInt>> {
    let mut rem = c.abs();
    if rem.is_zero() {
        return None;
    }
    let mut prime_powers: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000u64);
    while d <= limit && &d * &d <= rem {
        let mut e = 0u32;
        while (&rem % &d).is_zero() {
            rem /= &d;
            e += 1;
        }
        if e > 0 {
            prime_powers.push((d.clone(), e));
        }
        d += 1;
    }
    if !rem.is_one() {
        // After trial division to 10^6, a remainder below 10^12 is prime.
        if rem >= &limit * &limit {
            return None;
        }
        prime_powers.push((rem, 1));
    }
    let mut divisors = vec![BigInt::one()];
    for (p, e) in prime_powers {
        let mut next = Vec::new();
        for div in &divisors {
            let mut pp = BigInt::one();
            for _ in 0..=e {
                next.push(div * &pp);
                pp *= &p;
            }
        }
        if next.len() > cap {
            return None;
        }
        divisors = next;
    }
    divisors.sort();
    Some(divisors)
}

/// y-degree sums achievable by sub-multisets of the given degree multiset.
fn achievable_sums(degrees: &[u64], total: u64) -> Vec<bool> {
    let mut can = vec![false; total as usize + 1];
    can[0] = true;
    for &d in degrees {
        for s in (d as usize..can.len()).rev() {
            if can[s - d as usize] {
                can[s] = true;
            }
        }
    }
    can
}

/// Reads a candidate bivariate factor off the balanced base-ξ digits of a
/// specialized factor; None when some digit sequence exceeds max_xdeg.
fn lift_by_digits(u_at_xi: &IntPoly, xi: &BigInt, half: &BigInt, max_xdeg: u64) -> Option<BiPoly> {
    let deg = u_at_xi.degree()?;
    let mut ycoeffs = Vec::with_capacity(deg as usize + 1);
    for j in 0..=deg {
        let mut n = u_at_xi.coeff(j);
        let mut digits = IntPoly::zero();
        let mut e = 0u64;
        while !n.is_zero() {
            if e > max_xdeg {
                return None;
            }
            let mut digit = n.mod_floor(xi);
            if &digit > half {
                digit -= xi;
            }
            n = (n - &digit) / xi;
            if !digit.is_zero() {
                digits.add_term(e, digit);
            }
            e += 1;
        }
        ycoeffs.push(digits);
    }
    Some(BiPoly::new(ycoeffs))
}

/// Depth-first enumeration of factor sub-multisets with y-degree ≤ half_deg;
/// calls visit on each product whose degree is still allowed.
fn enumerate_submultisets<F>(
    positions: &[(IntPoly, u32, u64)],
    allowed: &[bool],
    half_deg: u64,
    idx: usize,
    product: &IntPoly,
    degree: u64,
    visit: &mut F,
) -> Option<OracleVerdict>
where
    F: FnMut(&IntPoly, u64) -> Option<OracleVerdict>,
{
    if idx == positions.len() {
        if degree >= 1 && allowed[degree as usize] {
            return visit(product, degree);
        }
        return None;
    }
    let (q, mult, qdeg) = &positions[idx];
    let mut current = product.clone();
    let mut deg = degree;
    for a in 0..=*mult {
        if a > 0 {
            deg += qdeg;
            if deg > half_deg {
                return None;
            }
            current = current.mul(q);
        }
        if let Some(v) =
            enumerate_submultisets(positions, allowed, half_deg, idx + 1, &current, deg, visit)
        {
            return Some(v);
        }
    }
    None
}

/// Decides whether F is a power of x times an irreducible polynomial.
/// Strips x-powers and contents, prefilters candidate factor degrees with
/// two small specializations, then reconstructs candidate factors from one
/// large specialization and verifies each by exact division.
pub fn reducibility_oracle(f: &BiPoly, budget: &OracleBudget) -> OracleReport {
    let inconclusive = |xpow: u64, msg: &str| OracleReport {
        xpow,
        verdict: OracleVerdict::Inconclusive(msg.into()),
    };
    match f.deg_y() {
        None => return inconclusive(0, "the zero polynomial has no factorization to test"),
        Some(0) => return inconclusive(0, "the input has no y-dependence"),
        Some(_) => {}
    }
    let (core, xpow) = f.strip_x();

    let c = core.content_int();
    if !c.is_one() {
        let rest = div_int(&core, &c);
        return OracleReport {
            xpow,
            verdict: OracleVerdict::Factored(BiPoly::new(vec![IntPoly::constant(c)]), rest),
        };
    }
    let g = core.content_y();
    if g.degree().map_or(false, |dg| dg >= 1) {
        let rest = BiPoly::new(
            core.ycoeffs()
                .iter()
                .map(|h| {
                    if h.is_zero() {
                        Ok(IntPoly::zero())
                    } else {
                        h.div_exact(&g)
                    }
                })
                .collect::<Result<Vec<_>>>()
                .expect("the y-content divides every coefficient"),
        );
        return OracleReport {
            xpow,
            verdict: OracleVerdict::Factored(BiPoly::new(vec![g]), rest),
        };
    }

    let d = core.deg_y().unwrap();
    if d == 1 {
        return OracleReport {
            xpow,
            verdict: OracleVerdict::Irreducible,
        };
    }

    // Degree prefilter: a genuine factor keeps its y-degree at any point
    // where the leading y-coefficient does not vanish, so its degree must be
    // an achievable factor-degree sum at every such point.
    let half_deg = d / 2;
    let mut allowed = vec![true; half_deg as usize + 1];
    allowed[0] = false;
    let lead = core.leading_ycoeff();
    let mut used = 0u32;
    let mut skipped = 0u32;
    let mut a = BigInt::from(2);
    while used < 2 {
        if lead.eval(&a).is_zero() {
            skipped += 1;
            if skipped > budget.max_point_retries {
                break;
            }
        } else {
            let spec = core.eval_x(&a);
            let fac = match factor_z(&spec) {
                Ok(fac) => fac,
                Err(e) => return inconclusive(xpow, &format!("specialization failed: {e}")),
            };
            let mut degrees = Vec::new();
            for (q, e) in &fac.factors {
                let dq = q.degree().unwrap_or(0);
                for _ in 0..*e {
                    degrees.push(dq);
                }
            }
            let can = achievable_sums(&degrees, d);
            for (i, slot) in allowed.iter_mut().enumerate() {
                *slot = *slot && can[i];
            }
            used += 1;
        }
        a += 1;
    }
    if !allowed.iter().any(|&b| b) {
        return OracleReport {
            xpow,
            verdict: OracleVerdict::Irreducible,
        };
    }

    // One specialization point beyond twice the factor-coefficient bound:
    // any factor U of core satisfies H(U) ≤ 2^(deg_x + deg_y) · ‖core‖₂
    // (Mahler-measure bound), so balanced base-ξ digits of U(ξ,y)'s
    // coefficients recover U exactly.
    let dx = core.deg_x().unwrap_or(0);
    let bound = (BigInt::one() << ((dx + d) as usize)) * sqrt_ceil(&core.norm2_sq());
    let xi = &bound * 2 + 1;
    let w = core.eval_x(&xi);
    let fac = match factor_z(&w) {
        Ok(fac) => fac,
        Err(e) => return inconclusive(xpow, &format!("large-point factorization failed: {e}")),
    };
    let divisors = match bounded_divisors(&fac.content, 64) {
        Some(divs) => divs,
        None => {
            return inconclusive(xpow, "the specialization content resists factoring");
        }
    };
    let positions: Vec<(IntPoly, u32, u64)> = fac
        .factors
        .iter()
        .map(|(q, e)| (q.clone(), *e, q.degree().unwrap_or(0)))
        .collect();

    let mut tried = 0u64;
    let mut exhausted = false;
    let verdict = enumerate_submultisets(
        &positions,
        &allowed,
        half_deg,
        0,
        &IntPoly::one(),
        0,
        &mut |prod: &IntPoly, _deg: u64| {
            for cu in &divisors {
                tried += 1;
                if tried > budget.max_candidates {
                    exhausted = true;
                    return Some(OracleVerdict::Inconclusive(
                        "candidate budget exhausted".into(),
                    ));
                }
                let scaled = prod.mul_scalar(cu);
                if let Some(u) = lift_by_digits(&scaled, &xi, &bound, dx) {
                    if let Ok(q) = core.div_exact_y(&u) {
                        assert_eq!(u.mul(&q), core, "exact division must re-multiply");
                        return Some(OracleVerdict::Factored(u, q));
                    }
                }
            }
            None
        },
    );
    let _ = exhausted;
    OracleReport {
        xpow,
        verdict: verdict.unwrap_or(OracleVerdict::Irreducible),
    }
}

/// Which exponent twist a family member carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyShape {
    /// Coefficients twisted by x^(j·t).
    Ascending,
    /// Coefficients twisted by x^((r−j)·t).
    Descending,
}

/// A twisted instance reduced to its residue-class representative.
#[derive(Clone, Debug)]
pub struct ShiftReduced {
    /// t mod m.
    pub residue: u64,
    /// The power of x relating the two instances (descending shape only).
    pub xpow: u64,
    /// The representative polynomial F_ρ(x, y^m).
    pub instance: BiPoly,
    /// The verified substitution identity justifying the reduction.
    pub note: String,
}

/// Reduces the twisted instance F_t(x, y^m) to its residue representative
/// F_ρ(x, y^m) with ρ = t mod m.  For the ascending shape the identity is
/// F_t(x, (y/x^q)^m) = F_ρ(x, y^m); for the descending shape it is
/// F_t(x, (x^q·y)^m) = x^(r·q·m) · F_ρ(x, y^m), both with q = ⌊t/m⌋.
/// The identity is re-verified on the concrete polynomials before returning.
pub fn shift_reduce(
    spec: &FamilySpec,
    shape: FamilyShape,
    t: u64,
    m: u64,
) -> Result<ShiftReduced> {
    if m == 0 {
        return Err(Error::InvalidInput("the modulus m must be positive".into()));
    }
    let q = t / m;
    let residue = t % m;
    let qi = i64::try_from(q)
        .map_err(|_| Error::InvalidInput("shift quotient exceeds the supported range".into()))?;
    let (shifted_t, shifted_rho) = match shape {
        FamilyShape::Ascending => (spec.shift_ascending(t)?, spec.shift_ascending(residue)?),
        FamilyShape::Descending => (spec.shift_descending(t)?, spec.shift_descending(residue)?),
    };
    let full = shifted_t.bi_poly().subst_y_pow(m);
    let instance = shifted_rho.bi_poly().subst_y_pow(m);
    let (xpow, note) = match shape {
        FamilyShape::Ascending => {
            let (mapped, cleared) = full.shift_y_by_xpow(-qi);
            if cleared != 0 || mapped != instance {
                return Err(Error::ShapeMismatch(
                    "the ascending reduction identity failed to verify".into(),
                ));
            }
            let note = if q == 0 {
                format!("identity: t = {t} is already reduced mod {m}")
            } else {
                format!(
                    "substituting y -> y/x^{q} maps the t = {t} instance exactly onto t = {residue}"
                )
            };
            (0u64, note)
        }
        FamilyShape::Descending => {
            let r = spec.r() as u64;
            let xpow = r
                .checked_mul(q)
                .and_then(|v| v.checked_mul(m))
                .ok_or_else(|| Error::InvalidInput("x-power exponent overflows".into()))?;
            let (mapped, cleared) = full.shift_y_by_xpow(qi);
            if cleared != 0 || mapped != instance.mul_xpow(xpow) {
                return Err(Error::ShapeMismatch(
                    "the descending reduction identity failed to verify".into(),
                ));
            }
            let note = if q == 0 {
                format!("identity: t = {t} is already reduced mod {m}")
            } else {
                format!(
                    "substituting y -> x^{q}·y maps the t = {t} instance onto x^{xpow} times t = {residue}"
                )
            };
            (xpow, note)
        }
    };
    Ok(ShiftReduced {
        residue,
        xpow,
        instance,
        note,
    })
}
