//! End-to-end analysis of a sparse polynomial family, packaged as a
//! machine-checkable certificate.
//!
//! The input is a family F(x,y) = Σ fⱼ(x) yʲ together with optional side
//! conditions on the specialization exponent n.  The question is whether,
//! for every large n, the part of F(x,xⁿ) left after removing irreducible
//! reciprocal factors can be reducible.  A factorization of that part at
//! some large n forces one of finitely many bivariate events:
//!
//! * the base event: F(x,y) itself factors (one check covers every twist
//!   at stretch 1, because twisting by x^t is the substitution y → y/xᵗ or
//!   y → xᵗ·y, a unit of ℤ[x,1/x][y]);
//! * a grid event at a modulus m ∈ {2, 4} ∪ P and a twist class t ≡ ρ
//!   (mod m): the twisted instance F_ρ(x, y^m) factors.  P is the finite
//!   odd-prime set from the degree/height bound, and larger primes are
//!   discharged structurally whenever some coefficient carries two
//!   exponents closer together than any prime past the bound.
//!
//! Each grid cell is settled by the cheapest sufficient means: a declared
//! side condition emptying the class, the p-th power congruence, the
//! quartic parity filter, the already-settled square layer, or an actual
//! bivariate irreducibility check (evaluation certificate first, digit
//! reconstruction as fallback).  Within one class the congruence and
//! parity filters are invariant, since raising t by m shifts every
//! exponent of the j-th coefficient by a multiple of m; one representative
//! therefore answers for the whole class, and the reduction identity is
//! re-verified concretely on the t = ρ + m member.
//!
//! A clean grid yields the verdict that the non-reciprocal part is never
//! reducible for large n, which the reciprocal analysis can upgrade: if
//! the family equals ± its own reversal the members are products of
//! irreducible reciprocals; if instead every reciprocal candidate factor
//! is excluded, the members are outright irreducible (up to sign and a
//! power of x).  Certificates replay deterministically: re-running the
//! analysis on the echoed input with the recorded budgets must reproduce
//! the certificate byte for byte.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipoly::BiPoly;
use crate::bivar::{
    reducibility_oracle, required_points, shift_reduce, strip_x, vandermonde_irreducible,
    FamilyShape, OracleBudget, OracleVerdict, PointOutcome, VandermondeVerdict,
};
use crate::capelli::{case_ii_filter, prime_set, pth_power_obstruction, CaseIiFilter, FamilySpec};
use crate::error::{Error, Result};
use crate::gcd::gcd_many;
use crate::intpoly::IntPoly;
use crate::lacunary::{constraint_data, effective_n_bound};
use crate::parse::{parse_poly, poly_to_string};
use crate::reciprocal::{
    analyze_family_reciprocal, AffineFamily, CandidateExclusion, CandidateRecord, ExpBlock,
    FamilyReciprocalAnalysis,
};
use crate::unifactor::factor_z;

/// Caps on the finite searches behind a verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    /// Largest modulus (hence twist-class count) enumerated in the grid.
    pub t_max: u64,
    /// Evaluation points offered to each evaluation certificate.
    pub points: usize,
    /// Specialization retries inside the reconstruction oracle.
    pub attempts: u32,
    /// Shuffles the evaluation point order when set; the default order is
    /// ascending from 2.  Part of the determinism contract.
    pub seed: Option<u64>,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            t_max: 64,
            points: 64,
            attempts: 8,
            seed: None,
        }
    }
}

impl Budgets {
    /// The oracle budget these caps induce.
    fn oracle_budget(&self) -> OracleBudget {
        OracleBudget {
            max_candidates: 200_000,
            max_point_retries: self.attempts,
        }
    }
}

/// A declared arithmetic fact about every admissible specialization
/// exponent n.  Conditions are trusted, echoed into the certificate, and
/// used only to empty whole congruence classes of the grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SideCondition {
    /// n ≡ residue (mod modulus) never happens.
    ForbiddenResidue { modulus: u64, residue: u64 },
    /// gcd(n, value) = 1 for every admissible n.
    CoprimeTo { value: u64 },
}

impl SideCondition {
    /// Checks the declared parameters are well-formed.
    pub fn validate(&self) -> Result<()> {
        match *self {
            SideCondition::ForbiddenResidue { modulus, residue } => {
                if modulus < 2 {
                    return Err(Error::InvalidInput(
                        "a forbidden residue needs a modulus of at least 2".into(),
                    ));
                }
                if residue >= modulus {
                    return Err(Error::InvalidInput(
                        "the forbidden residue must be reduced modulo its modulus".into(),
                    ));
                }
            }
            SideCondition::CoprimeTo { value } => {
                if value == 0 {
                    return Err(Error::InvalidInput(
                        "the coprimality value must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// True when the condition excludes every n ≡ class (mod m).
    ///
    /// A forbidden residue c (mod M) empties the class exactly when M
    /// divides m and class ≡ c (mod M).  A coprimality requirement empties
    /// it when gcd(m, class) shares a factor with the value, since that
    /// factor divides every member of the class.
    pub fn kills_class(&self, m: u64, class: u64) -> bool {
        match *self {
            SideCondition::ForbiddenResidue { modulus, residue } => {
                m % modulus == 0 && class % modulus == residue
            }
            SideCondition::CoprimeTo { value } => m.gcd(&class).gcd(&value) > 1,
        }
    }
}

/// A univariate polynomial stored in both human and machine form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRepr {
    /// Canonical text rendering.
    pub text: String,
    /// Exact (exponent, coefficient) pairs, exponents ascending.
    pub terms: Vec<(u64, String)>,
}

impl PolyRepr {
    /// Captures a polynomial in both forms.
    pub fn of(p: &IntPoly) -> Self {
        PolyRepr {
            text: poly_to_string(p),
            terms: p.terms().map(|(e, c)| (e, c.to_string())).collect(),
        }
    }

    /// Rebuilds the polynomial, insisting the two stored forms agree.
    pub fn load(&self) -> Result<IntPoly> {
        let mut terms = Vec::new();
        for (e, c) in &self.terms {
            let c: BigInt = c
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad stored coefficient {c:?}")))?;
            terms.push((*e, c));
        }
        let p = IntPoly::from_terms(terms);
        if poly_to_string(&p) != self.text {
            return Err(Error::InvalidInput(format!(
                "stored text {:?} does not match the stored term list",
                self.text
            )));
        }
        Ok(p)
    }
}

/// Renders a bivariate polynomial as a sum of y-coefficient blocks.
pub fn bipoly_text(f: &BiPoly) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut pieces = Vec::new();
    for (j, c) in f.ycoeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let head = format!("({})", poly_to_string(c));
        pieces.push(match j {
            0 => head,
            1 => format!("{head}*y"),
            _ => format!("{head}*y^{j}"),
        });
    }
    pieces.join(" + ")
}

/// A bivariate polynomial stored in both human and machine form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiPolyRepr {
    /// Canonical text rendering.
    pub text: String,
    /// (y-power, coefficient) for each non-zero y-coefficient, ascending.
    pub yterms: Vec<(u64, PolyRepr)>,
}

impl BiPolyRepr {
    /// Captures a polynomial in both forms.
    pub fn of(f: &BiPoly) -> Self {
        BiPolyRepr {
            text: bipoly_text(f),
            yterms: f
                .ycoeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(j, c)| (j as u64, PolyRepr::of(c)))
                .collect(),
        }
    }

    /// Rebuilds the polynomial, insisting the two stored forms agree.
    pub fn load(&self) -> Result<BiPoly> {
        let mut last = None;
        let mut terms = Vec::new();
        for (j, c) in &self.yterms {
            if last.map_or(false, |prev| *j <= prev) {
                return Err(Error::InvalidInput(
                    "stored y-powers must be strictly ascending".into(),
                ));
            }
            last = Some(*j);
            terms.push((*j, c.load()?));
        }
        let f = BiPoly::from_yterms(terms);
        if bipoly_text(&f) != self.text {
            return Err(Error::InvalidInput(format!(
                "stored text {:?} does not match the stored coefficients",
                self.text
            )));
        }
        Ok(f)
    }
}

/// The JSON-facing description of an analysis input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInputDoc {
    /// Index of the top coefficient; must equal f.len() − 1.
    pub r: usize,
    /// f₀ … f_r as polynomial text in x.
    pub f: Vec<String>,
    /// Declared facts about admissible specialization exponents.
    #[serde(default)]
    pub side_conditions: Vec<SideCondition>,
    /// Optional affine exponent blocks (coeff, slope, offset) declaring
    /// that the specializations of interest are Σ coeff·x^(slope·n+offset).
    /// Used by the reciprocal analysis and by concrete factorizations; the
    /// declaration that it presents the same specializations as the
    /// coefficient list is the caller's.
    #[serde(default)]
    pub offsets: Option<Vec<(String, i64, i64)>>,
}

/// A fully parsed analysis input.
#[derive(Clone, Debug)]
pub struct FamilyInput {
    /// The family coefficients.
    pub spec: FamilySpec,
    /// Declared constraints on the specialization exponent.
    pub side_conditions: Vec<SideCondition>,
    /// Optional affine presentation of the specializations.
    pub offsets: Option<AffineFamily>,
}

impl FamilyInput {
    /// Parses and validates a document.
    pub fn from_doc(doc: &FamilyInputDoc) -> Result<Self> {
        if doc.f.is_empty() {
            return Err(Error::InvalidInput(
                "the family needs at least one coefficient".into(),
            ));
        }
        if doc.r != doc.f.len() - 1 {
            return Err(Error::InvalidInput(format!(
                "r = {} does not match the {} coefficients listed",
                doc.r,
                doc.f.len()
            )));
        }
        let coeffs = doc
            .f
            .iter()
            .map(|s| parse_poly(s))
            .collect::<Result<Vec<_>>>()?;
        let spec = FamilySpec::new(coeffs)?;
        for cond in &doc.side_conditions {
            cond.validate()?;
        }
        let offsets = match &doc.offsets {
            None => None,
            Some(blocks) => {
                let mut parsed = Vec::new();
                for (text, a, b) in blocks {
                    parsed.push((parse_poly(text)?, *a, *b));
                }
                Some(AffineFamily::new(parsed)?)
            }
        };
        Ok(FamilyInput {
            spec,
            side_conditions: doc.side_conditions.clone(),
            offsets,
        })
    }

    /// Canonical echo of this input.
    pub fn to_doc(&self) -> FamilyInputDoc {
        FamilyInputDoc {
            r: self.spec.r(),
            f: self.spec.coeffs().iter().map(|c| poly_to_string(c)).collect(),
            side_conditions: self.side_conditions.clone(),
            offsets: self.offsets.as_ref().map(|fam| {
                fam.blocks()
                    .iter()
                    .map(|blk| (poly_to_string(&blk.coeff), blk.a, blk.b))
                    .collect()
            }),
        }
    }

    /// The affine presentation used for reciprocal analysis and concrete
    /// specializations: the declared one, or the exponents j·n.
    pub fn affine_family(&self) -> Result<AffineFamily> {
        if let Some(fam) = &self.offsets {
            return Ok(fam.clone());
        }
        let blocks = self
            .spec
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, fj)| !fj.is_zero())
            .map(|(j, fj)| (fj.clone(), j as i64, 0i64))
            .collect();
        AffineFamily::new(blocks)
    }
}

/// Pass/fail record of the family hypotheses, with witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// gcd(f₀, …, f_r) = 1.
    pub coprime: bool,
    /// The common divisor when coprimality fails.
    pub gcd_witness: Option<PolyRepr>,
    /// f₀(0) ≠ 0.
    pub nonzero_constant_base: bool,
    /// f_r ≠ 0 (structural; enforced at construction).
    pub top_nonzero: bool,
    /// Some fⱼ has positive degree (the bivariate grid needs x to appear).
    pub some_coeff_nonconstant: bool,
    /// All of the above.
    pub all_pass: bool,
}

/// Checks every family hypothesis, never failing: violations are reported
/// with witnesses instead.
pub fn check_hypotheses(spec: &FamilySpec) -> HypothesisReport {
    let coprime = spec.is_coprime();
    let gcd_witness = if coprime {
        None
    } else {
        Some(PolyRepr::of(&gcd_many(spec.coeffs())))
    };
    let nonzero_constant_base = spec.has_nonzero_constant_base();
    let top_nonzero = !spec.coeff(spec.r()).is_zero();
    let some_coeff_nonconstant = spec.has_nonconstant_coeff();
    HypothesisReport {
        all_pass: coprime && nonzero_constant_base && top_nonzero && some_coeff_nonconstant,
        coprime,
        gcd_witness,
        nonzero_constant_base,
        top_nonzero,
        some_coeff_nonconstant,
    }
}

/// Blocker messages for a failing hypothesis report.
fn hypothesis_blockers(h: &HypothesisReport) -> Vec<String> {
    let mut out = Vec::new();
    if !h.coprime {
        out.push("the coefficients share a non-unit common divisor".into());
    }
    if !h.nonzero_constant_base {
        out.push("f_0 has a zero constant term; remove the common power of x first".into());
    }
    if !h.top_nonzero {
        out.push("the top coefficient vanishes".into());
    }
    if !h.some_coeff_nonconstant {
        out.push("every coefficient is constant; the bivariate grid needs x to appear".into());
    }
    out
}

/// The numeric frame the family induces on the grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSummary {
    /// Index of the top coefficient.
    pub r: u64,
    /// Residue window fraction, exact.
    pub eps: String,
    /// Least folding modulus, exact.
    pub k0: String,
    /// Bound on admissible twists as a function of the modulus.
    pub t_bound: String,
    /// Degree/height bound generating the odd-prime set.
    pub prime_bound: u64,
    /// Odd primes that can carry a reducibility event.
    pub odd_primes: Vec<u64>,
}

/// How one bivariate irreducibility question was settled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CheckRecord {
    /// Enough primitive irreducible integer specializations were counted.
    EvaluationPoints {
        /// Power of x stripped before evaluating.
        xpow: u64,
        /// y-degree of the stripped core.
        deg_y: u64,
        /// Counted points needed: 2·deg_y + 1.
        required: usize,
        /// Counted points found.
        counted: usize,
        /// Every visited point with its outcome.
        points: Vec<(i64, String)>,
    },
    /// Complete factor search through coefficient-digit reconstruction.
    DigitReconstruction {
        /// Power of x stripped before searching.
        xpow: u64,
        /// What the search concluded.
        verdict: String,
        /// The witness split when one was found.
        factors: Option<Box<(BiPolyRepr, BiPolyRepr)>>,
    },
}

/// Internal three-way status behind a check record.
#[derive(Clone, Debug)]
enum CheckStatus {
    Irreducible,
    Reducible,
    Undecided(String),
}

/// A check record together with its machine-readable status.
#[derive(Clone, Debug)]
struct CheckReport {
    record: CheckRecord,
    status: CheckStatus,
}

/// The evaluation points a budget provides, shuffled when seeded.
fn evaluation_points(budgets: &Budgets) -> Vec<i64> {
    let mut pts = crate::bivar::ascending_points(budgets.points);
    if let Some(seed) = budgets.seed {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        pts.shuffle(&mut rng);
    }
    pts
}

/// Short name of a point outcome for the certificate.
fn point_name(o: PointOutcome) -> &'static str {
    match o {
        PointOutcome::Counted => "counted",
        PointOutcome::Imprimitive => "imprimitive",
        PointOutcome::ReducibleHere => "reducible_here",
        PointOutcome::Degenerate => "degenerate",
    }
}

/// Settles one bivariate irreducibility question: evaluation certificate
/// first when the point budget can reach the required count, then the
/// complete reconstruction oracle.
fn run_check(inst: &BiPoly, budgets: &Budgets) -> CheckReport {
    if inst.is_zero() {
        return CheckReport {
            record: CheckRecord::DigitReconstruction {
                xpow: 0,
                verdict: "undecided: zero polynomial".into(),
                factors: None,
            },
            status: CheckStatus::Undecided("zero polynomial".into()),
        };
    }
    if let Ok(stripped) = strip_x(inst) {
        let d = stripped.core.deg_y().unwrap_or(0);
        if d >= 2 && required_points(d) <= budgets.points {
            if let Ok(VandermondeVerdict::Irreducible(ec)) =
                vandermonde_irreducible(&stripped.core, &evaluation_points(budgets))
            {
                return CheckReport {
                    record: CheckRecord::EvaluationPoints {
                        xpow: stripped.xpow,
                        deg_y: ec.deg_y,
                        required: ec.required,
                        counted: ec.counted,
                        points: ec
                            .points
                            .iter()
                            .map(|(k, o)| (*k, point_name(*o).to_string()))
                            .collect(),
                    },
                    status: CheckStatus::Irreducible,
                };
            }
        }
    }
    let report = reducibility_oracle(inst, &budgets.oracle_budget());
    let (status, verdict, factors) = match &report.verdict {
        OracleVerdict::Irreducible => (CheckStatus::Irreducible, "irreducible".to_string(), None),
        OracleVerdict::Factored(u, v) => (
            CheckStatus::Reducible,
            "reducible".to_string(),
            Some(Box::new((BiPolyRepr::of(u), BiPolyRepr::of(v)))),
        ),
        OracleVerdict::Inconclusive(msg) => (
            CheckStatus::Undecided(msg.clone()),
            format!("undecided: {msg}"),
            None,
        ),
    };
    CheckReport {
        record: CheckRecord::DigitReconstruction {
            xpow: report.xpow,
            verdict,
            factors,
        },
        status,
    }
}

/// Three-way irreducibility answer using the same strategy as the grid:
/// evaluation certificate first, digit reconstruction as fallback.
pub fn oracle_outcome(inst: &BiPoly, budgets: &Budgets) -> crate::capelli::OracleOutcome {
    use crate::capelli::OracleOutcome;
    match run_check(inst, budgets).status {
        CheckStatus::Irreducible => OracleOutcome::Irreducible,
        CheckStatus::Reducible => OracleOutcome::Reducible,
        CheckStatus::Undecided(_) => OracleOutcome::Undecided,
    }
}

/// Which twist pattern a grid cell is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeTag {
    /// Coefficients twisted by x^(j·t); covers n = k·ℓ + t.
    Ascending,
    /// Coefficients twisted by x^((r−j)·t); covers n = k·ℓ − t.
    Descending,
}

impl ShapeTag {
    fn to_shape(self) -> FamilyShape {
        match self {
            ShapeTag::Ascending => FamilyShape::Ascending,
            ShapeTag::Descending => FamilyShape::Descending,
        }
    }
}

/// The concrete term blocking a p-th power congruence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceWitness {
    /// Coefficient index j whose twisted block carries the term.
    pub coeff_index: u64,
    /// The exponent not divisible by p.
    pub exponent: u64,
    /// Its coefficient, not divisible by p.
    pub coefficient: String,
}

/// The first term of the twisted family violating the p-th power shape.
fn congruence_witness(spec: &FamilySpec, p: u64) -> Option<CongruenceWitness> {
    let modulus = BigInt::from(p);
    for (j, fj) in spec.coeffs().iter().enumerate() {
        for (e, c) in fj.terms() {
            if !(c % &modulus).is_zero() && e % p != 0 {
                return Some(CongruenceWitness {
                    coeff_index: j as u64,
                    exponent: e,
                    coefficient: c.to_string(),
                });
            }
        }
    }
    None
}

/// How one grid cell was settled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CellOutcome {
    /// A declared side condition empties the whole congruence class.
    SideConditionExcluded {
        condition: SideCondition,
        derivation: String,
    },
    /// The p-th power congruence fails, so no factorization can exist at
    /// this modulus anywhere in the class.
    CongruenceObstructed {
        prime: u64,
        witness: CongruenceWitness,
    },
    /// Quartic cell: the parity divisibilities fail and so does the mod-2
    /// congruence, closing every route to a factorization.
    QuarticRouteExcluded { reason: String },
    /// Quartic cell: a factorization could only come through the square
    /// layer, whose matching cell was verified irreducible.
    SettledBySquare,
    /// Quartic cell: the matching square cell already factored, so this
    /// instance factors too.
    ReducibleBySquare,
    /// The representative instance is a power of x times an irreducible.
    Verified { check: CheckRecord },
    /// A genuine factorization was found: the large-n claim fails here.
    FactorizationFound { check: CheckRecord },
    /// The check ran out of budget.
    Undecided {
        check: Option<CheckRecord>,
        reason: String,
    },
}

/// One cell of the finite check grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub shape: ShapeTag,
    /// The substitution modulus m (2, 4, or an odd prime).
    pub modulus: u64,
    /// The twist-class representative ρ = t mod m.
    pub residue: u64,
    /// The congruence class of n this cell covers.
    pub n_class: String,
    /// Concretely verified identity collapsing t = ρ + m onto t = ρ.
    pub reduction: String,
    /// The representative instance, recorded when a check ran on it.
    pub instance: Option<BiPolyRepr>,
    /// Extra filter detail (e.g. which parity divisibility held).
    pub note: Option<String>,
    pub outcome: CellOutcome,
}

/// The single check covering every twist at stretch 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseCell {
    /// F(x,y) itself.
    pub poly: BiPolyRepr,
    pub check: CheckRecord,
    /// Why one check suffices for every twist.
    pub note: String,
}

/// Discharge of every odd prime beyond the precomputed set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LargePrimeEntry {
    /// Some coefficient carries two terms whose exponent gap and
    /// coefficient sizes stay below every prime past the bound: the p-th
    /// power congruence then fails for all those primes at every twist of
    /// both shapes, because the two exponents shift together and p divides
    /// neither their gap nor either coefficient.
    Discharged {
        coeff_index: u64,
        exponents: (u64, u64),
        gap: u64,
        height: String,
        prime_bound: u64,
    },
    /// Every coefficient is a monomial: no structural witness exists.
    Blocked { reason: String },
}

/// Finds a structural witness discharging every odd prime past the bound.
fn discharge_large_primes(spec: &FamilySpec, bound: u64) -> LargePrimeEntry {
    for (j, fj) in spec.coeffs().iter().enumerate() {
        if fj.num_terms() >= 2 {
            let exps: Vec<u64> = fj.terms().map(|(e, _)| e).take(2).collect();
            return LargePrimeEntry::Discharged {
                coeff_index: j as u64,
                exponents: (exps[0], exps[1]),
                gap: exps[1] - exps[0],
                height: fj.height().to_string(),
                prime_bound: bound,
            };
        }
    }
    LargePrimeEntry::Blocked {
        reason: "every coefficient is a monomial, so no exponent gap bounds the primes".into(),
    }
}

/// One affine exponent block coeff·x^(slope·n+offset).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRepr {
    pub coeff: PolyRepr,
    pub slope: i64,
    pub offset: i64,
}

impl BlockRepr {
    fn of(block: &ExpBlock) -> Self {
        BlockRepr {
            coeff: PolyRepr::of(&block.coeff),
            slope: block.a,
            offset: block.b,
        }
    }
}

/// Why a reciprocal candidate divides no large family member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ExclusionRepr {
    /// Its divisibility pattern in n has an empty residue set.
    EmptyResidues { period: u64 },
    /// It divides at most finitely many members.
    FinitelyManyN,
    /// Its leading coefficient does not divide the family's.
    LeadingCoefficient,
}

/// One irreducible factor of the collapsed difference block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRepr {
    pub factor: PolyRepr,
    pub is_reciprocal: bool,
    /// None when the factor is not reciprocal (no exclusion needed).
    pub exclusion: Option<ExclusionRepr>,
}

impl CandidateRepr {
    fn of(c: &CandidateRecord) -> Self {
        CandidateRepr {
            factor: PolyRepr::of(&c.factor),
            is_reciprocal: c.is_reciprocal,
            exclusion: c.exclusion.as_ref().map(|e| match e {
                CandidateExclusion::EmptyResidues { period } => {
                    ExclusionRepr::EmptyResidues { period: *period }
                }
                CandidateExclusion::FinitelyManyN => ExclusionRepr::FinitelyManyN,
                CandidateExclusion::LeadingCoefficient => ExclusionRepr::LeadingCoefficient,
            }),
        }
    }
}

/// The reciprocal-factor analysis attached to the verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ReciprocalRecord {
    /// The family equals sign · its reversal identically for large n:
    /// every large member is itself reciprocal.
    FamilyReciprocal { sign: i8 },
    /// Every reciprocal irreducible factor of the difference block was
    /// excluded: large members have no reciprocal factors at all.
    NoReciprocalFactors {
        difference_block: BlockRepr,
        candidates: Vec<CandidateRepr>,
        /// Explicit threshold when every exclusion is effective.
        effective_from: Option<i64>,
    },
    /// The difference did not collapse or a candidate survived.
    Unresolved {
        reason: String,
        candidates: Vec<CandidateRepr>,
    },
    /// Skipped: the grid did not reach a conclusive verdict.
    NotEvaluated,
}

/// Final classification of the family's large-n specializations, up to
/// sign and powers of x.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The part left after removing irreducible reciprocal factors is
    /// irreducible or constant for every large n.
    NonReciprocalPartNotReducibleForLargeN,
    /// Large members are outright irreducible.
    IrreducibleForLargeN,
    /// Large members are products of irreducible reciprocal factors.
    ProductOfIrreducibleReciprocalsForLargeN,
    /// Some check failed, factored, or ran out of budget; see blockers.
    Inconclusive,
}

impl Verdict {
    /// True for every verdict except Inconclusive.
    pub fn is_conclusive(self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

/// A derived lower bound past which the asymptotic verdict is asserted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveNNote {
    /// Decimal threshold on n.
    pub bound: String,
    pub note: String,
}

/// The complete machine-checkable analysis record.  Re-running the
/// analysis on the echoed input with the recorded budgets reproduces the
/// certificate exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Canonical echo of the analyzed input.
    pub input: FamilyInputDoc,
    /// The budgets that shaped every finite search.
    pub budgets: Budgets,
    pub hypotheses: HypothesisReport,
    pub constraints: Option<ConstraintSummary>,
    /// The stretch-1 check shared by every twist.
    pub base: Option<BaseCell>,
    /// One cell per (shape, modulus, twist class), ordered.
    pub grid: Vec<GridCell>,
    /// Moduli skipped because they exceed the t_max budget.
    pub skipped_moduli: Vec<u64>,
    /// Odd primes beyond the precomputed set.
    pub large_primes: Option<LargePrimeEntry>,
    pub reciprocal: ReciprocalRecord,
    pub verdict: Verdict,
    /// What stood in the way when the verdict is inconclusive.
    pub blockers: Vec<String>,
    pub effective_n: Option<EffectiveNNote>,
}

/// A planned grid cell on its way to an outcome.
struct CellPlan {
    shape: ShapeTag,
    modulus: u64,
    rho: u64,
    class_text: String,
    reduction: String,
    instance: BiPoly,
    note: Option<String>,
    decision: CellDecision,
    checked: bool,
}

#[derive(Clone)]
enum CellDecision {
    Done(CellOutcome),
    NeedsOracle,
    ViaSquare,
}

/// Plans one cell: reduces to the class representative, verifies the
/// collapse identity concretely, and applies the cheap filters.
fn plan_cell(input: &FamilyInput, shape: ShapeTag, m: u64, rho: u64) -> Result<CellPlan> {
    let spec = &input.spec;
    let reduced = shift_reduce(spec, shape.to_shape(), rho, m)?;
    // Verify on an actual class member that raising t by m only changes
    // the instance by a unit substitution; the witness note records it.
    let step = shift_reduce(spec, shape.to_shape(), rho + m, m)?;
    let n_class = match shape {
        ShapeTag::Ascending => rho % m,
        ShapeTag::Descending => (m - rho % m) % m,
    };
    let class_text = format!("n ≡ {n_class} (mod {m})");
    let mut plan = CellPlan {
        shape,
        modulus: m,
        rho,
        class_text,
        reduction: step.note,
        instance: reduced.instance,
        note: None,
        decision: CellDecision::NeedsOracle,
        checked: false,
    };

    for cond in &input.side_conditions {
        if cond.kills_class(m, n_class) {
            plan.decision = CellDecision::Done(CellOutcome::SideConditionExcluded {
                condition: cond.clone(),
                derivation: format!(
                    "every n covered by this cell satisfies n ≡ {n_class} (mod {m}), which the condition excludes"
                ),
            });
            return Ok(plan);
        }
    }

    let shifted = match shape {
        ShapeTag::Ascending => spec.shift_ascending(rho)?,
        ShapeTag::Descending => spec.shift_descending(rho)?,
    };
    // The filters are class-invariant: raising t by m shifts the j-th
    // block's exponents by a multiple of m, invisible mod p (and mod 2 for
    // the quartic filter).  Spot-check that on the next class member.
    #[cfg(debug_assertions)]
    {
        let next = match shape {
            ShapeTag::Ascending => spec.shift_ascending(rho + m)?,
            ShapeTag::Descending => spec.shift_descending(rho + m)?,
        };
        if m == 4 {
            debug_assert_eq!(case_ii_filter(&shifted), case_ii_filter(&next));
        } else {
            debug_assert_eq!(
                pth_power_obstruction(&shifted, m),
                pth_power_obstruction(&next, m)
            );
        }
    }

    plan.decision = if m == 4 {
        match case_ii_filter(&shifted) {
            CaseIiFilter::RuledOut => CellDecision::Done(CellOutcome::QuarticRouteExcluded {
                reason: "the parity divisibilities fail and so does the mod-2 congruence".into(),
            }),
            CaseIiFilter::OnlyViaSquare => CellDecision::ViaSquare,
            CaseIiFilter::NotRuledOut { reason } => {
                plan.note = Some(format!("parity filter open: {reason}"));
                CellDecision::NeedsOracle
            }
            CaseIiFilter::NotApplicable => CellDecision::NeedsOracle,
        }
    } else if pth_power_obstruction(&shifted, m) {
        CellDecision::NeedsOracle
    } else {
        let witness = congruence_witness(&shifted, m)
            .expect("the failed congruence pins a violating term");
        CellDecision::Done(CellOutcome::CongruenceObstructed { prime: m, witness })
    };
    Ok(plan)
}

/// Runs every still-open selected cell, one check per distinct instance,
/// deterministically in parallel.
fn run_wave<F: Fn(&CellPlan) -> bool>(plans: &mut [CellPlan], budgets: &Budgets, select: F) {
    let mut unique: Vec<BiPoly> = Vec::new();
    let mut index: HashMap<BiPoly, usize> = HashMap::new();
    for plan in plans
        .iter()
        .filter(|p| select(p) && matches!(p.decision, CellDecision::NeedsOracle))
    {
        if !index.contains_key(&plan.instance) {
            index.insert(plan.instance.clone(), unique.len());
            unique.push(plan.instance.clone());
        }
    }
    let reports: Vec<CheckReport> = unique
        .par_iter()
        .map(|inst| run_check(inst, budgets))
        .collect();
    for plan in plans
        .iter_mut()
        .filter(|p| select(p) && matches!(p.decision, CellDecision::NeedsOracle))
    {
        let report = &reports[index[&plan.instance]];
        plan.checked = true;
        plan.decision = CellDecision::Done(match &report.status {
            CheckStatus::Irreducible => CellOutcome::Verified {
                check: report.record.clone(),
            },
            CheckStatus::Reducible => CellOutcome::FactorizationFound {
                check: report.record.clone(),
            },
            CheckStatus::Undecided(reason) => CellOutcome::Undecided {
                check: Some(report.record.clone()),
                reason: reason.clone(),
            },
        });
    }
}

/// Analyzes a family end to end and returns its certificate.  Errors are
/// reserved for malformed inputs; mathematical obstacles become an
/// inconclusive certificate with blockers.
pub fn analyze_family(input: &FamilyInput, budgets: &Budgets) -> Result<Certificate> {
    for cond in &input.side_conditions {
        cond.validate()?;
    }
    let spec = &input.spec;
    let hypotheses = check_hypotheses(spec);
    let mut cert = Certificate {
        input: input.to_doc(),
        budgets: budgets.clone(),
        hypotheses,
        constraints: None,
        base: None,
        grid: Vec::new(),
        skipped_moduli: Vec::new(),
        large_primes: None,
        reciprocal: ReciprocalRecord::NotEvaluated,
        verdict: Verdict::Inconclusive,
        blockers: Vec::new(),
        effective_n: None,
    };
    if !cert.hypotheses.all_pass {
        cert.blockers = hypothesis_blockers(&cert.hypotheses);
        return Ok(cert);
    }

    let primes = prime_set(spec)?;
    let data = constraint_data(spec);
    cert.constraints = Some(ConstraintSummary {
        r: data.r,
        eps: data.eps.to_string(),
        k0: data.k0.to_string(),
        t_bound: format!("t < k/{}", data.r * (data.r + 1)),
        prime_bound: primes.bound,
        odd_primes: primes.primes.clone(),
    });
    if let Ok(bound) = effective_n_bound(spec) {
        cert.effective_n = Some(EffectiveNNote {
            bound: bound.to_string(),
            note: "least n with the specialization degree past the sparse-degree threshold \
                   and all exponent blocks separated; the verdict is asserted from here on"
                .into(),
        });
    }

    let base_poly = spec.bi_poly();
    let base_report = run_check(&base_poly, budgets);
    let mut blockers = Vec::new();
    match &base_report.status {
        CheckStatus::Irreducible => {}
        CheckStatus::Reducible => blockers.push(
            "F(x,y) itself factors, so the large-n criterion cannot apply".to_string(),
        ),
        CheckStatus::Undecided(reason) => {
            blockers.push(format!("the check of F(x,y) ran out of budget: {reason}"))
        }
    }
    cert.base = Some(BaseCell {
        poly: BiPolyRepr::of(&base_poly),
        check: base_report.record,
        note: "covers every twist at stretch 1: substituting y → y/x^t or y → x^t·y \
               turns a factorization of a twisted instance into one of F(x,y) itself"
            .into(),
    });
    if !blockers.is_empty() {
        cert.blockers = blockers;
        return Ok(cert);
    }

    let mut moduli: Vec<u64> = vec![2, 4];
    moduli.extend(primes.primes.iter().copied());
    moduli.sort_unstable();
    let active: Vec<u64> = moduli
        .iter()
        .copied()
        .filter(|&m| m <= budgets.t_max)
        .collect();
    cert.skipped_moduli = moduli.iter().copied().filter(|&m| m > budgets.t_max).collect();
    for &m in &cert.skipped_moduli {
        blockers.push(format!(
            "modulus {m} exceeds the t_max budget of {}; its twist classes were not checked",
            budgets.t_max
        ));
    }

    let mut plans: Vec<CellPlan> = Vec::new();
    for &shape in &[ShapeTag::Ascending, ShapeTag::Descending] {
        for &m in &active {
            for rho in 0..m {
                plans.push(plan_cell(input, shape, m, rho)?);
            }
        }
    }

    // The square layer first: quartic cells may be settled by it.
    run_wave(&mut plans, budgets, |p| p.modulus == 2);
    let square: HashMap<(ShapeTag, u64), CellDecision> = plans
        .iter()
        .filter(|p| p.modulus == 2)
        .map(|p| ((p.shape, p.rho), p.decision.clone()))
        .collect();
    for plan in plans.iter_mut().filter(|p| p.modulus == 4) {
        if !matches!(plan.decision, CellDecision::ViaSquare) {
            continue;
        }
        plan.decision = match square.get(&(plan.shape, plan.rho % 2)) {
            Some(CellDecision::Done(CellOutcome::Verified { .. })) => {
                CellDecision::Done(CellOutcome::SettledBySquare)
            }
            Some(CellDecision::Done(CellOutcome::FactorizationFound { .. })) => {
                CellDecision::Done(CellOutcome::ReducibleBySquare)
            }
            // Undecided square, or (defensively) anything else: check the
            // quartic instance directly.
            _ => CellDecision::NeedsOracle,
        };
    }
    run_wave(&mut plans, budgets, |_| true);

    cert.grid = plans
        .into_iter()
        .map(|p| {
            let outcome = match p.decision {
                CellDecision::Done(o) => o,
                _ => CellOutcome::Undecided {
                    check: None,
                    reason: "cell left unresolved".into(),
                },
            };
            GridCell {
                shape: p.shape,
                modulus: p.modulus,
                residue: p.rho,
                n_class: p.class_text,
                reduction: p.reduction,
                instance: p.checked.then(|| BiPolyRepr::of(&p.instance)),
                note: p.note,
                outcome,
            }
        })
        .collect();

    for cell in &cert.grid {
        match &cell.outcome {
            CellOutcome::FactorizationFound { .. } | CellOutcome::ReducibleBySquare => {
                blockers.push(format!(
                    "cell ({:?}, m = {}, ρ = {}) found a factorization; the claim fails on that class",
                    cell.shape, cell.modulus, cell.residue
                ));
            }
            CellOutcome::Undecided { reason, .. } => {
                blockers.push(format!(
                    "cell ({:?}, m = {}, ρ = {}) is undecided: {reason}",
                    cell.shape, cell.modulus, cell.residue
                ));
            }
            _ => {}
        }
    }

    let large = discharge_large_primes(spec, primes.bound);
    if let LargePrimeEntry::Blocked { reason } = &large {
        blockers.push(format!(
            "odd primes beyond {} are not excluded: {reason}",
            primes.bound
        ));
    }
    cert.large_primes = Some(large);

    if blockers.is_empty() {
        cert.verdict = Verdict::NonReciprocalPartNotReducibleForLargeN;
        cert = reciprocal_upgrade(cert, input);
    } else {
        cert.blockers = blockers;
    }
    Ok(cert)
}

/// Upgrades a clean grid verdict using the reciprocal-factor analysis of
/// the family's affine presentation.  Idempotent; a no-op unless the
/// verdict states the non-reciprocal part is not reducible.
pub fn reciprocal_upgrade(mut cert: Certificate, input: &FamilyInput) -> Certificate {
    if cert.verdict != Verdict::NonReciprocalPartNotReducibleForLargeN {
        return cert;
    }
    let family = match input.affine_family() {
        Ok(f) => f,
        Err(e) => {
            cert.reciprocal = ReciprocalRecord::Unresolved {
                reason: e.to_string(),
                candidates: Vec::new(),
            };
            return cert;
        }
    };
    match analyze_family_reciprocal(&family) {
        Ok(FamilyReciprocalAnalysis::FamilyReciprocal { sign }) => {
            cert.reciprocal = ReciprocalRecord::FamilyReciprocal { sign };
            cert.verdict = Verdict::ProductOfIrreducibleReciprocalsForLargeN;
        }
        Ok(FamilyReciprocalAnalysis::NoReciprocalFactors {
            block,
            candidates,
            effective_from,
        }) => {
            cert.reciprocal = ReciprocalRecord::NoReciprocalFactors {
                difference_block: BlockRepr::of(&block),
                candidates: candidates.iter().map(CandidateRepr::of).collect(),
                effective_from,
            };
            cert.verdict = Verdict::IrreducibleForLargeN;
        }
        Ok(FamilyReciprocalAnalysis::Inconclusive { reason, candidates }) => {
            cert.reciprocal = ReciprocalRecord::Unresolved {
                reason,
                candidates: candidates.iter().map(CandidateRepr::of).collect(),
            };
        }
        Err(e) => {
            cert.reciprocal = ReciprocalRecord::Unresolved {
                reason: e.to_string(),
                candidates: Vec::new(),
            };
        }
    }
    cert
}

/// One factor of a concrete factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorEntry {
    pub factor: PolyRepr,
    pub multiplicity: u32,
    pub is_reciprocal: bool,
}

/// A fully factored integer polynomial with reciprocal flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcreteFactorization {
    /// The specialization exponent, when the polynomial came from a family.
    pub n: Option<i64>,
    pub poly: PolyRepr,
    /// The sign of the factorization.
    pub unit: i32,
    /// The integer content.
    pub content: String,
    /// Irreducible factors, sorted by degree then text.
    pub factors: Vec<FactorEntry>,
}

/// Factors a polynomial completely and flags reciprocal factors.
pub fn factor_listing(poly: &IntPoly) -> Result<ConcreteFactorization> {
    let fac = factor_z(poly)?;
    let mut entries: Vec<(IntPoly, u32)> = fac.factors;
    entries.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| poly_to_string(a).cmp(&poly_to_string(b)))
    });
    Ok(ConcreteFactorization {
        n: None,
        poly: PolyRepr::of(poly),
        unit: fac.unit,
        content: fac.content.to_string(),
        factors: entries
            .into_iter()
            .map(|(g, e)| FactorEntry {
                is_reciprocal: g.is_reciprocal(),
                factor: PolyRepr::of(&g),
                multiplicity: e,
            })
            .collect(),
    })
}

/// Factors one concrete specialization of the family, using the declared
/// affine presentation when present and the exponents j·n otherwise.
pub fn concrete_check(input: &FamilyInput, n: i64) -> Result<ConcreteFactorization> {
    if n < 1 {
        return Err(Error::InvalidInput(
            "the specialization exponent must be positive".into(),
        ));
    }
    let poly = match &input.offsets {
        Some(fam) => fam.eval(n)?,
        None => input.spec.bi_poly().eval_y_xpow(n as u64),
    };
    let mut listing = factor_listing(&poly)?;
    listing.n = Some(n);
    Ok(listing)
}

/// Result of replaying a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    /// Paths into the certificate where the replay differed.
    pub mismatches: Vec<String>,
}

/// Renders a JSON value compactly for a mismatch message.
fn short_json(v: &serde_json::Value) -> String {
    let s = v.to_string();
    if s.len() <= 160 {
        return s;
    }
    let mut end = 160;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    format!("{}…", &s[..end])
}

/// Records the first differing paths between two JSON values.
fn diff_json(path: &str, a: &serde_json::Value, b: &serde_json::Value, out: &mut Vec<String>) {
    use serde_json::Value;
    if out.len() >= 20 || a == b {
        return;
    }
    match (a, b) {
        (Value::Object(ma), Value::Object(mb)) => {
            for key in ma.keys().chain(mb.keys().filter(|k| !ma.contains_key(*k))) {
                let sub_a = ma.get(key).unwrap_or(&Value::Null);
                let sub_b = mb.get(key).unwrap_or(&Value::Null);
                diff_json(&format!("{path}.{key}"), sub_a, sub_b, out);
            }
        }
        (Value::Array(va), Value::Array(vb)) if va.len() == vb.len() => {
            for (i, (sub_a, sub_b)) in va.iter().zip(vb).enumerate() {
                diff_json(&format!("{path}[{i}]"), sub_a, sub_b, out);
            }
        }
        _ => out.push(format!(
            "{path}: stored {} but replay produced {}",
            short_json(a),
            short_json(b)
        )),
    }
}

/// Replays a certificate: re-parses the echoed input, re-runs the analysis
/// under the recorded budgets, and compares the result field by field.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyReport> {
    let input = FamilyInput::from_doc(&cert.input)?;
    let fresh = analyze_family(&input, &cert.budgets)?;
    let a = serde_json::to_value(cert)
        .map_err(|e| Error::InvalidInput(format!("certificate does not serialize: {e}")))?;
    let b = serde_json::to_value(&fresh)
        .map_err(|e| Error::InvalidInput(format!("replay does not serialize: {e}")))?;
    let mut mismatches = Vec::new();
    diff_json("certificate", &a, &b, &mut mismatches);
    Ok(VerifyReport {
        pass: mismatches.is_empty(),
        mismatches,
    })
}

/// Schema version written into certificate documents.
pub const CERTIFICATE_VERSION: &str = "v1";

/// Wall-clock metadata excluded from replay comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub analyze_ms: u64,
}

/// Tool configuration snapshot carried alongside a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub tool_version: String,
    /// Worker threads requested; never affects certificate content.
    pub threads: Option<usize>,
}

/// Versioned on-disk wrapper around a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDocument {
    /// Schema version; always "v1".
    pub version: String,
    pub config: ConfigSnapshot,
    pub timings: Timings,
    pub certificate: Certificate,
}

impl CertificateDocument {
    /// Wraps a certificate with the current schema version.
    pub fn new(certificate: Certificate, analyze_ms: u64, threads: Option<usize>) -> Self {
        CertificateDocument {
            version: CERTIFICATE_VERSION.into(),
            config: ConfigSnapshot {
                tool_version: env!("CARGO_PKG_VERSION").into(),
                threads,
            },
            timings: Timings { analyze_ms },
            certificate,
        }
    }

    /// Replays the wrapped certificate after checking the schema version.
    pub fn verify(&self) -> Result<VerifyReport> {
        if self.version != CERTIFICATE_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported certificate version {:?}; this tool writes {CERTIFICATE_VERSION:?}",
                self.version
            )));
        }
        verify_certificate(&self.certificate)
    }
}
