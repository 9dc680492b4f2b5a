//! Exponent folding between one and two variables.
//!
//! A sparse polynomial F(x) = a_0 + a_1 x^{d_1} + ... + a_m x^{d_m} folds
//! into a bivariate G(x,y) once an integer k is found with every exponent
//! residue d_j mod k inside [0, eps*k) or ((1-eps)*k, k): writing
//! d_j + floor(eps*k) = k*l_j + e_j with 0 <= e_j < k sends the term to
//! x^{e_j} y^{l_j}, and G(x,x^k) = x^{floor(eps*k)} * F(x) by construction.
//! This module computes the exact rational thresholds that guarantee such k
//! exist, finds them (by direct scan and by a constructive pigeonhole
//! search), performs the fold, and matches folded output against the two
//! twisted family shapes that control the specializations y = x^n for all
//! large n.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bipoly::BiPoly;
use crate::bivar::FamilyShape;
use crate::capelli::FamilySpec;
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn big_rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// Window and threshold parameters for the exponent-folding search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionConfig {
    /// Residue window half-width as a fraction of the modulus; in (0, 1/4].
    pub eps: BigRational,
    /// Least admissible modulus; at least 2.
    pub k0: BigRational,
    /// floor(1/eps) + 1, chosen so eps - 1/kappa > 0 even when 1/eps is an integer.
    pub kappa: u64,
    /// Term-count parameter used by `degree_threshold`; 0 when not tied to a family.
    pub n_param: u64,
}

impl ReductionConfig {
    /// Validates the window parameters and derives kappa.
    pub fn new(eps: BigRational, k0: BigRational) -> Result<Self> {
        let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
        if !eps.is_positive() || eps > quarter {
            return Err(Error::InvalidInput("eps must lie in (0, 1/4]".into()));
        }
        if k0 < rat(2) {
            return Err(Error::InvalidInput("k0 must be at least 2".into()));
        }
        let kappa = (BigRational::one() / &eps).floor().to_integer();
        let kappa = kappa
            .to_u64()
            .and_then(|k| k.checked_add(1))
            .ok_or_else(|| Error::InvalidInput("eps is too small".into()))?;
        Ok(ReductionConfig { eps, k0, kappa, n_param: 0 })
    }

    /// The parameters used when reducing a coefficient family: window 1/(2r+2)
    /// and least modulus twice the largest coefficient degree.
    pub fn for_family(spec: &FamilySpec) -> Result<Self> {
        let data = constraint_data(spec);
        let mut cfg = ReductionConfig::new(data.eps, data.k0)?;
        cfg.n_param = term_parameter(spec);
        Ok(cfg)
    }
}

/// Strictly increasing non-negative exponents, the input to the k-search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector {
    v: Vec<u64>,
}

impl ExponentVector {
    /// Wraps a strictly increasing list of non-negative integers.
    pub fn new(v: Vec<u64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidInput("exponent vector is empty".into()));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "exponent vector must be strictly increasing".into(),
            ));
        }
        Ok(ExponentVector { v })
    }

    /// The exponents of the nonzero terms of `f`, in increasing order.
    pub fn from_poly(f: &IntPoly) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        ExponentVector::new(f.terms().map(|(e, _)| e).collect())
    }

    /// Number of exponents.
    pub fn rho(&self) -> usize {
        self.v.len()
    }

    /// The largest exponent.
    pub fn max_exponent(&self) -> u64 {
        *self.v.last().expect("nonempty")
    }

    /// The exponents as a slice.
    pub fn as_slice(&self) -> &[u64] {
        &self.v
    }
}

/// The exact threshold above which the constructive k-search is guaranteed
/// to succeed on a vector of `rho` exponents:
/// max{kappa^(2 rho - 2)/2 * (eps - 1/kappa)^(-1), k0 * (kappa^(rho-1) + eps)}.
pub fn v_bound(rho: u64, cfg: &ReductionConfig) -> BigRational {
    assert!(rho >= 1, "rho must be positive");
    let kappa = big_rat(&BigInt::from(cfg.kappa));
    let gap = &cfg.eps - BigRational::one() / &kappa;
    let exp = |e: u64| -> BigRational {
        big_rat(&BigInt::from(cfg.kappa).pow(u32::try_from(e).expect("exponent fits u32")))
    };
    let first = exp(2 * rho - 2) / rat(2) / gap;
    let second = &cfg.k0 * (exp(rho - 1) + &cfg.eps);
    first.max(second)
}

/// The degree threshold of the folding theorem for this configuration's
/// term-count parameter.
pub fn degree_threshold(cfg: &ReductionConfig) -> BigRational {
    v_bound(cfg.n_param.max(1), cfg)
}

/// Whether `v mod k` falls in the window [0, eps*k) or ((1-eps)*k, k).
pub fn residue_in_window(v: u64, k: u64, eps: &BigRational) -> bool {
    let r = rat(v % k);
    let kk = rat(k);
    r < eps * &kk || r > (BigRational::one() - eps) * kk
}

/// u128 fast path for the window test: eps as a small fraction pe/qe.
struct Window {
    pe: u128,
    qe: u128,
}

impl Window {
    fn new(eps: &BigRational) -> Option<Window> {
        let pe = eps.numer().to_u128()?;
        let qe = eps.denom().to_u128()?;
        if qe > 1 << 40 {
            return None;
        }
        Some(Window { pe, qe })
    }

    fn ok(&self, r: u64, k: u64) -> bool {
        let (r, k) = (r as u128, k as u128);
        r * self.qe < self.pe * k || r * self.qe > (self.qe - self.pe) * k
    }
}

/// Every k in [ceil(k0), hi] whose residues all pass the window test,
/// where the scan is restricted to `k_lo..=k_hi`.
pub fn find_k_in_range(v: &ExponentVector, cfg: &ReductionConfig, k_lo: u64, k_hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if k_lo > k_hi {
        return out;
    }
    match Window::new(&cfg.eps) {
        Some(w) => {
            for k in k_lo..=k_hi {
                if v.as_slice().iter().all(|&e| w.ok(e % k, k)) {
                    out.push(k);
                }
            }
        }
        None => {
            for k in k_lo..=k_hi {
                if v.as_slice().iter().all(|&e| residue_in_window(e, k, &cfg.eps)) {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// All k in [ceil(k0), v_max/(1-eps)) passing the window test for every
/// exponent, by direct scan.
pub fn find_k_bruteforce(v: &ExponentVector, cfg: &ReductionConfig) -> Vec<u64> {
    let k_lo = cfg.k0.ceil().to_integer().to_u64().unwrap_or(2).max(2);
    // Largest k with k < v_max/(1-eps), i.e. k*(qe-pe) < v_max*qe exactly.
    let bound = big_rat(&BigInt::from(v.max_exponent())) / (BigRational::one() - &cfg.eps);
    let k_hi = ((bound.numer() - BigInt::one()).div_floor(bound.denom()))
        .to_u64()
        .unwrap_or(0);
    find_k_in_range(v, cfg, k_lo, k_hi)
}

/// Outcome of the constructive k-search.
#[derive(Debug, Clone)]
pub struct ConstructiveK {
    /// The modulus found.
    pub k: u64,
    /// The threshold the vector had to meet.
    pub threshold: BigRational,
    /// The pigeonhole difference d = d1 - d2 (1 when rho = 1).
    pub d: u64,
    /// The colliding scan indices (d1, d2), absent when rho = 1.
    pub collision: Option<(u64, u64)>,
    /// Nearest integers to d * v_j / v_max, one per exponent.
    pub w: Vec<u64>,
}

/// Constructive search for a window modulus: scan multiples of the scaled
/// exponents until two land in the same kappa-grid cell, take the
/// difference d, and pick the least integer k with
/// k/v_max in ((d + 1/kappa)/(d(d+eps)), (d - 1/kappa)/(d(d-eps))).
pub fn find_k_constructive(v: &ExponentVector, cfg: &ReductionConfig) -> Result<ConstructiveK> {
    let rho = v.rho() as u64;
    let vmax = v.max_exponent();
    let threshold = v_bound(rho, cfg);
    if rat(vmax) < threshold {
        return Err(Error::BelowThreshold {
            need: threshold.to_string(),
            found: vmax.to_string(),
        });
    }

    if rho == 1 {
        // A single exponent is its own modulus: residue 0, and the threshold
        // already forces v_max >= k0*(1 + eps) > k0.
        return Ok(ConstructiveK {
            k: vmax,
            threshold,
            d: 1,
            collision: None,
            w: vec![1],
        });
    }

    let cells = (cfg.kappa as u128)
        .checked_pow(u32::try_from(rho - 1).map_err(|_| {
            Error::InvalidInput("exponent vector is too long".into())
        })?)
        .filter(|&c| c <= 1 << 40)
        .ok_or_else(|| Error::InvalidInput("pigeonhole grid is too large".into()))?;

    // First collision of grid cells, scanning d' = 1, 2, ... in order.
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut found = None;
    for dp in 1..=(cells as u64 + 1) {
        let key: Vec<u64> = v.as_slice()[..v.rho() - 1]
            .iter()
            .map(|&vj| {
                let rem = (dp as u128 * vj as u128) % vmax as u128;
                ((cfg.kappa as u128 * rem) / vmax as u128) as u64
            })
            .collect();
        if let Some(&prev) = seen.get(&key) {
            found = Some((dp, prev));
            break;
        }
        seen.insert(key, dp);
    }
    let (d1, d2) = found.ok_or_else(|| {
        Error::ConstructionFailed("pigeonhole collision did not occur".into())
    })?;
    let d = d1 - d2;

    let w: Vec<u64> = v
        .as_slice()
        .iter()
        .map(|&vj| ((2 * d as u128 * vj as u128 + vmax as u128) / (2 * vmax as u128)) as u64)
        .collect();

    // Least integer strictly inside the open interval.
    let dr = rat(d);
    let inv_kappa = BigRational::one() / rat(cfg.kappa);
    let lo = rat(vmax) * (&dr + &inv_kappa) / (&dr * (&dr + &cfg.eps));
    let hi = rat(vmax) * (&dr - &inv_kappa) / (&dr * (&dr - &cfg.eps));
    let k = (lo.floor().to_integer() + BigInt::one())
        .to_u64()
        .ok_or_else(|| Error::ConstructionFailed("modulus exceeds u64".into()))?;

    if rat(k) >= hi {
        return Err(Error::ConstructionFailed(
            "interval for the modulus contains no integer".into(),
        ));
    }
    if rat(k) < cfg.k0 || rat(k) >= rat(vmax) / (BigRational::one() - &cfg.eps) {
        return Err(Error::ConstructionFailed(
            "constructed modulus escapes the admissible range".into(),
        ));
    }
    if !v.as_slice().iter().all(|&e| residue_in_window(e, k, &cfg.eps)) {
        return Err(Error::ConstructionFailed(
            "constructed modulus fails the residue windows".into(),
        ));
    }

    Ok(ConstructiveK { k, threshold, d, collision: Some((d1, d2)), w })
}

/// One term's fold data: d + floor(eps*k) = k*ell + dbar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldedTerm {
    /// The original exponent d.
    pub exponent: u64,
    /// The x-exponent after folding.
    pub dbar: u64,
    /// The y-exponent after folding.
    pub ell: u64,
}

/// Record of a performed fold, sufficient to replay it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionWitness {
    /// The modulus used.
    pub k: u64,
    /// floor(eps * k).
    pub floor_eps_k: u64,
    /// Per-term fold data in increasing exponent order.
    pub folded: Vec<FoldedTerm>,
    /// The largest power of x dividing the folded polynomial.
    pub xpow: u64,
}

/// Folds a sparse univariate polynomial into two variables along x^k.
/// The identity G(x,x^k) = x^{floor(eps*k)} * F(x) is asserted before
/// returning.
pub fn fold_exponents(
    f: &IntPoly,
    k: u64,
    cfg: &ReductionConfig,
) -> Result<(BiPoly, ReductionWitness)> {
    if k < 2 {
        return Err(Error::InvalidInput("fold modulus must be at least 2".into()));
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.constant_term().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let fek = (&cfg.eps * rat(k))
        .floor()
        .to_integer()
        .to_u64()
        .expect("floor(eps*k) fits u64 since eps <= 1/4");

    let mut folded = Vec::new();
    let mut slices: std::collections::BTreeMap<u64, IntPoly> = Default::default();
    for (e, c) in f.terms() {
        let shifted = e
            .checked_add(fek)
            .ok_or_else(|| Error::InvalidInput("exponent overflow during fold".into()))?;
        let ell = shifted / k;
        let dbar = shifted % k;
        if ell > 1 << 24 {
            return Err(Error::InvalidInput(
                "folded y-degree is too large to materialize".into(),
            ));
        }
        folded.push(FoldedTerm { exponent: e, dbar, ell });
        slices.entry(ell).or_insert_with(IntPoly::zero).add_term(dbar, c.clone());
    }
    let g = BiPoly::from_yterms(slices);
    assert_eq!(
        g.eval_y_xpow(k),
        f.mul_xpow(fek),
        "fold identity must hold by construction"
    );
    let xpow = g.strip_x().1;
    Ok((g, ReductionWitness { k, floor_eps_k: fek, folded, xpow }))
}

/// One of the two twisted bivariate instances attached to a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremOneInstance {
    /// Which twist pattern: ascending j*t or descending (r-j)*t.
    pub shape: FamilyShape,
    /// The x-twist step.
    pub t: u64,
    /// The y-stretch; positive.
    pub ell: u64,
    /// The instance itself.
    pub poly: BiPoly,
}

/// Builds the ascending instance sum_j f_j x^{j t} y^{j ell} and the
/// descending instance sum_j f_j x^{(r-j) t} y^{j ell}.
pub fn theorem1_instances(
    spec: &FamilySpec,
    t: u64,
    ell: u64,
) -> Result<(TheoremOneInstance, TheoremOneInstance)> {
    if ell == 0 {
        return Err(Error::InvalidInput("y-stretch must be positive".into()));
    }
    let ascending = TheoremOneInstance {
        shape: FamilyShape::Ascending,
        t,
        ell,
        poly: spec.shift_ascending(t)?.bi_poly().subst_y_pow(ell),
    };
    let descending = TheoremOneInstance {
        shape: FamilyShape::Descending,
        t,
        ell,
        poly: spec.shift_descending(t)?.bi_poly().subst_y_pow(ell),
    };
    Ok((ascending, descending))
}

/// The window, modulus floor, and twist-bound data a family induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintData {
    /// Index of the top coefficient.
    pub r: u64,
    /// Window fraction 1/(2r+2).
    pub eps: BigRational,
    /// Least modulus, twice the largest coefficient degree.
    pub k0: BigRational,
    /// The largest coefficient degree itself.
    pub max_coeff_degree: u64,
}

impl ConstraintData {
    /// The twist bound k/(r(r+1)); admissible twists satisfy t < this.
    pub fn t_bound(&self, k: u64) -> BigRational {
        rat(k) / rat(self.r * (self.r + 1))
    }

    /// The specialization exponent produced by (k, ell, t) under each shape:
    /// k*ell + t ascending, k*ell - t descending.
    pub fn n_value(&self, shape: FamilyShape, k: u64, ell: u64, t: u64) -> BigInt {
        let base = BigInt::from(k) * BigInt::from(ell);
        match shape {
            FamilyShape::Ascending => base + BigInt::from(t),
            FamilyShape::Descending => base - BigInt::from(t),
        }
    }

    /// The reduction configuration these constraints induce.
    pub fn config(&self) -> Result<ReductionConfig> {
        ReductionConfig::new(self.eps.clone(), self.k0.clone())
    }
}

/// Derives the window and modulus constraints from a family.
pub fn constraint_data(spec: &FamilySpec) -> ConstraintData {
    let r = spec.r() as u64;
    let max_deg = spec
        .coeffs()
        .iter()
        .filter_map(|f| f.degree())
        .max()
        .unwrap_or(0);
    ConstraintData {
        r,
        eps: BigRational::new(BigInt::one(), BigInt::from(2 * r + 2)),
        k0: rat(2 * max_deg),
        max_coeff_degree: max_deg,
    }
}

/// The term-count parameter of a family's specializations once blocks
/// separate: 2 * sum of squared coefficient norms + 2m - 5, where m + 1 is
/// the total number of terms.
pub fn term_parameter(spec: &FamilySpec) -> u64 {
    let norm_sq: BigInt = spec.coeffs().iter().map(|f| f.norm2_sq()).sum();
    let terms: u64 = spec.coeffs().iter().map(|f| f.num_terms() as u64).sum();
    let n = BigInt::from(2) * norm_sq + BigInt::from(2) * BigInt::from(terms - 1)
        - BigInt::from(5);
    n.max(BigInt::one()).to_u64().unwrap_or(u64::MAX)
}

/// The least specialization exponent past which the degree threshold of the
/// folding theorem is met and exponent blocks cannot overlap.  Derived, and
/// typically astronomically large; reported, never enumerated to.
pub fn effective_n_bound(spec: &FamilySpec) -> Result<BigInt> {
    let data = constraint_data(spec);
    if data.r == 0 {
        return Err(Error::InvalidInput("family has a single coefficient".into()));
    }
    let cfg = ReductionConfig::for_family(spec)?;
    let threshold = degree_threshold(&cfg);
    let top_deg = spec.coeff(spec.r()).degree().unwrap_or(0);
    let from_threshold = ((threshold - rat(top_deg)) / rat(data.r)).ceil().to_integer();
    let from_blocks = BigInt::from(data.max_coeff_degree + 1);
    Ok(from_threshold.max(from_blocks))
}

/// How a folded specialization aligns with a twisted family instance.
#[derive(Debug, Clone)]
pub struct ShapeMatch {
    /// The matched twist pattern.
    pub shape: FamilyShape,
    /// The twist step, recovered from n = k*ell +/- t.
    pub t: u64,
    /// The y-stretch, recovered from the top folded block.
    pub ell: u64,
    /// Signed x-power with fold = x^{m0} * instance.
    pub m0: i64,
    /// Whether t < k/(r(r+1)).
    pub within_t_bound: bool,
    /// The matched instance.
    pub instance: TheoremOneInstance,
}

/// Folds F(x, x^n) along x^k and verifies that the result is an exact
/// x-power shift of one of the two twisted instances.  When every nonzero
/// coefficient of the family has a nonzero constant term, the shift is
/// x^{floor(eps*k)} for the ascending shape and x^{floor(eps*k) - r*t} for
/// the descending one; coefficients divisible by x can push the shift
/// negative or the twist past its bound, which the returned record exposes.
pub fn match_family_shape(
    spec: &FamilySpec,
    n: u64,
    k: u64,
    cfg: &ReductionConfig,
) -> Result<ShapeMatch> {
    if n == 0 {
        return Err(Error::InvalidInput("specialization exponent must be positive".into()));
    }
    let r = spec.r() as u64;
    if r == 0 {
        return Err(Error::InvalidInput("family has a single coefficient".into()));
    }
    let f0 = spec.bi_poly().eval_y_xpow(n);
    let (g, wit) = fold_exponents(&f0, k, cfg)?;

    let top_ell = wit.folded.last().expect("nonzero polynomial folds to terms").ell;
    if top_ell % r != 0 || top_ell == 0 {
        return Err(Error::ShapeMismatch(format!(
            "top folded block has y-exponent {top_ell}, not a positive multiple of {r}"
        )));
    }
    let ell = top_ell / r;

    let stretch = k as u128 * ell as u128;
    let (shape, t) = if n as u128 >= stretch {
        (FamilyShape::Ascending, (n as u128 - stretch) as u64)
    } else {
        let t = stretch - n as u128;
        let t = u64::try_from(t)
            .map_err(|_| Error::ShapeMismatch("twist step exceeds u64".into()))?;
        (FamilyShape::Descending, t)
    };

    let (asc, desc) = theorem1_instances(spec, t, ell)?;
    let instance = match shape {
        FamilyShape::Ascending => asc,
        FamilyShape::Descending => desc,
    };

    let m0 = match shape {
        FamilyShape::Ascending => wit.floor_eps_k as i128,
        FamilyShape::Descending => wit.floor_eps_k as i128 - (r as i128) * (t as i128),
    };
    let matches = if m0 >= 0 {
        g == instance.poly.mul_xpow(u64::try_from(m0).expect("nonneg"))
    } else {
        g.mul_xpow(u64::try_from(-m0).expect("pos")) == instance.poly
    };
    if !matches {
        return Err(Error::ShapeMismatch(
            "folded polynomial is not an x-power shift of either twisted instance".into(),
        ));
    }

    let data = constraint_data(spec);
    let within_t_bound = rat(t) < data.t_bound(k);
    Ok(ShapeMatch {
        shape,
        t,
        ell,
        m0: i64::try_from(m0).map_err(|_| Error::ShapeMismatch("x-shift exceeds i64".into()))?,
        within_t_bound,
        instance,
    })
}
