//! Randomized invariants for the polynomial toolkit: print/parse round
//! trips, reversal and normalization identities, homomorphism and divisor
//! laws, and brute-force cross-checks of the congruence filter, the family
//! divisibility patterns, and the grid-class exclusions.

use lacpoly::capelli::{prime_set, pth_power_obstruction, FamilySpec};
use lacpoly::gcd::gcd_zx;
use lacpoly::modpoly::ModPoly;
use lacpoly::parse::{laurent_to_string, parse_laurent, parse_poly, poly_to_string};
use lacpoly::pipeline::SideCondition;
use lacpoly::reciprocal::{family_divides, split_reciprocal, AffineFamily, FamilyDivisibility};
use lacpoly::unifactor::factor_z;
use lacpoly::{BiPoly, IntPoly, LaurentPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

/// Parses a polynomial literal for fixture pools.
fn p(s: &str) -> IntPoly {
    parse_poly(s).unwrap()
}

/// Strategy over sparse integer polynomials with the given degree cap.
fn sparse_poly(max_deg: u64, max_terms: usize) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec((0..=max_deg, -50i64..=50), 1..=max_terms)
        .prop_map(|ts| IntPoly::from_terms(ts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

/// Strategy over sparse Laurent polynomials with negative exponents allowed.
fn sparse_laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-30i64..=30, -50i64..=50), 1..=8)
        .prop_map(|ts| LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

/// Strategy over bivariate polynomials with small x- and y-degrees.
fn sparse_bipoly() -> impl Strategy<Value = BiPoly> {
    prop::collection::vec(sparse_poly(5, 4), 1..=4).prop_map(BiPoly::new)
}

/// Strategy over polynomials with a forced non-zero constant term.
fn poly_with_unit_tail(max_deg: u64, max_terms: usize) -> impl Strategy<Value = IntPoly> {
    (sparse_poly(max_deg, max_terms), 1i64..=50, prop::bool::ANY).prop_map(|(f, c, neg)| {
        let mut g = f;
        if g.constant_term().is_zero() {
            g.add_term(0, BigInt::from(if neg { -c } else { c }));
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn printed_polynomials_parse_back(f in sparse_poly(40, 8)) {
        prop_assert_eq!(parse_poly(&poly_to_string(&f)).unwrap(), f);
    }

    #[test]
    fn printed_laurent_polynomials_parse_back(f in sparse_laurent()) {
        prop_assert_eq!(parse_laurent(&laurent_to_string(&f)).unwrap(), f);
    }
}

proptest! {
    #[test]
    fn reversing_coefficients_twice_is_the_identity(f in poly_with_unit_tail(30, 8)) {
        let r = f.reciprocal();
        prop_assert_eq!(r.norm2_sq(), f.norm2_sq());
        prop_assert_eq!(r.reciprocal(), f);
    }

    #[test]
    fn laurent_normalization_shifts_to_a_nonzero_constant_term(f in sparse_laurent()) {
        prop_assume!(!f.is_zero());
        let (core, shift) = f.j_normalize().unwrap();
        prop_assert!(!core.constant_term().is_zero());
        let shifted: Vec<(i64, BigInt)> =
            core.terms().map(|(e, c)| (e as i64 - shift, c.clone())).collect();
        let original: Vec<(i64, BigInt)> = f.terms().map(|(e, c)| (e, c.clone())).collect();
        prop_assert_eq!(shifted, original);
        let (again, zero_shift) = LaurentPoly::from_int_poly(&core).j_normalize().unwrap();
        prop_assert_eq!(&again, &core);
        prop_assert_eq!(zero_shift, 0);
    }

    #[test]
    fn reduction_mod_p_is_a_ring_homomorphism(
        f in sparse_poly(12, 6),
        g in sparse_poly(12, 6),
        q in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]),
    ) {
        let fq = ModPoly::from_int_poly(&f, q);
        let gq = ModPoly::from_int_poly(&g, q);
        prop_assert_eq!(ModPoly::from_int_poly(&f.mul(&g), q), fq.mul(&gq));
        prop_assert_eq!(ModPoly::from_int_poly(&f.add(&g), q), fq.add(&gq));
    }

    #[test]
    fn shifting_y_there_and_back_costs_only_an_x_power(
        f in sparse_bipoly(),
        q in -5i64..=5,
    ) {
        let (g, e1) = f.shift_y_by_xpow(q);
        let (h, e2) = g.shift_y_by_xpow(-q);
        prop_assert_eq!(h, f.mul_xpow(e1 + e2));
    }

    #[test]
    fn stripping_x_factors_out_the_exact_power(f in sparse_bipoly()) {
        prop_assume!(!f.is_zero());
        let (core, m) = f.strip_x();
        prop_assert_eq!(core.mul_xpow(m), f);
        let min_order = core.ycoeffs().iter().filter_map(|c| c.ord_x()).min();
        prop_assert_eq!(min_order, Some(0));
    }

    #[test]
    fn gcd_divides_both_arguments_and_any_common_factor(
        a in sparse_poly(6, 4),
        b in sparse_poly(6, 4),
        c in sparse_poly(4, 3),
    ) {
        prop_assume!(!a.is_zero() && !b.is_zero() && !c.is_zero());
        let (ac, bc) = (a.mul(&c), b.mul(&c));
        let g = gcd_zx(&ac, &bc);
        prop_assert!(g.divides(&ac));
        prop_assert!(g.divides(&bc));
        prop_assert!(c.primitive_part().divides(&g));
        prop_assert_eq!(g.lc_sign(), 1);
    }

    #[test]
    fn class_exclusions_match_a_direct_residue_scan(
        cond in prop_oneof![
            (2u64..=9, 0u64..=8).prop_map(|(m, r)| SideCondition::ForbiddenResidue {
                modulus: m,
                residue: r % m,
            }),
            (1u64..=30).prop_map(|v| SideCondition::CoprimeTo { value: v }),
        ],
        m in 1u64..=12,
        class_raw in 0u64..=11,
    ) {
        let class = class_raw % m;
        cond.validate().unwrap();
        // A class dies exactly when no member n = class + i*m survives the
        // condition; both condition kinds only depend on n modulo a fixed
        // cycle, so scanning one full cycle of i decides the question.
        let brute = match cond {
            SideCondition::ForbiddenResidue { modulus, residue } => {
                (0..modulus).all(|i| (class + i * m) % modulus == residue)
            }
            SideCondition::CoprimeTo { value } => {
                (0..value).all(|i| (class + i * m).gcd(&value) > 1)
            }
        };
        prop_assert_eq!(cond.kills_class(m, class), brute);
    }
}

/// All residue polynomials mod p of degree at most `d`.
fn all_modpolys(q: u64, d: usize) -> Vec<ModPoly> {
    let mut out = Vec::new();
    for code in 0..(q as usize).pow(d as u32 + 1) {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = code;
        for _ in 0..=d {
            coeffs.push((rest % q as usize) as u64);
            rest /= q as usize;
        }
        out.push(ModPoly::from_coeffs(q, coeffs));
    }
    out
}

/// Primality by trial division; inputs stay tiny.
fn is_odd_prime(n: u64) -> bool {
    n > 2 && n % 2 == 1 && (3..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Strategy over exponent families: free-form blocks drawn from a fixture
/// pool, mixed with the x^(an+b) - c shape whose divisors recur periodically.
fn affine_family() -> impl Strategy<Value = AffineFamily> {
    let pool = vec![
        p("1"),
        p("-1"),
        p("2"),
        p("x+1"),
        p("x-1"),
        p("x^2+x+1"),
        p("x^2+2"),
        p("3*x^2+x+3"),
    ];
    let free = prop::collection::vec((prop::sample::select(pool), 1i64..=3, 0i64..=4), 1..=3)
        .prop_map(|blocks| AffineFamily::new(blocks).unwrap());
    let power = (1i64..=3, 0i64..=4, 1i64..=3).prop_map(|(a, b, c)| {
        AffineFamily::new(vec![(IntPoly::one(), a, b), (IntPoly::constant(-c), 0, 0)]).unwrap()
    });
    prop_oneof![free, power]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn congruence_filter_matches_an_exhaustive_power_search(
        polys in prop::collection::vec(sparse_poly(6, 3), 1..=3),
        q in prop::sample::select(vec![2u64, 3]),
    ) {
        prop_assume!(!polys.last().unwrap().is_zero());
        let spec = FamilySpec::new(polys.clone()).unwrap();
        let candidates = all_modpolys(q, 6 / q as usize);
        let brute = polys.iter().all(|fj| {
            let target = ModPoly::from_int_poly(fj, q);
            candidates.iter().any(|g| {
                let mut acc = ModPoly::one(q);
                for _ in 0..q {
                    acc = acc.mul(g);
                }
                acc == target
            })
        });
        prop_assert_eq!(pth_power_obstruction(&spec, q), brute);
    }

    #[test]
    fn removing_reciprocal_factors_splits_the_input_exactly(
        base in poly_with_unit_tail(4, 4),
        picks in prop::collection::vec(0usize..4, 0..=2),
    ) {
        let pool = [p("x+1"), p("x^2+1"), p("x^2+3*x+1"), p("x^4+x^3+x^2+x+1")];
        let mut f = base;
        for i in picks {
            f = f.mul(&pool[i]);
        }
        let split = split_reciprocal(&f).unwrap();
        let rec = &split.reciprocal_part;
        let mut rebuilt = IntPoly::constant(BigInt::from(rec.unit) * &rec.content);
        for (factor, mult) in &rec.factors {
            prop_assert!(factor.is_reciprocal());
            rebuilt = rebuilt.mul(&factor.pow(*mult as u64));
        }
        prop_assert_eq!(rebuilt.mul(&split.nonreciprocal_part), f);
        if split.nonreciprocal_part.degree().unwrap_or(0) > 0 {
            for (factor, _) in factor_z(&split.nonreciprocal_part).unwrap().factors {
                prop_assert!(!factor.is_reciprocal());
            }
        }
    }

    #[test]
    fn prime_sets_are_exactly_the_odd_primes_under_a_tight_bound(
        polys in prop::collection::vec(sparse_poly(6, 4), 1..=4),
    ) {
        prop_assume!(!polys.last().unwrap().is_zero());
        let spec = FamilySpec::new(polys.clone()).unwrap();
        let ps = prime_set(&spec).unwrap();
        for q in 3..=ps.bound {
            prop_assert_eq!(ps.primes.contains(&q), is_odd_prime(q));
        }
        let bound = BigInt::from(ps.bound);
        let mut achieved = false;
        for fj in &polys {
            if let Some(d) = fj.degree() {
                prop_assert!(BigInt::from(d) <= bound);
                prop_assert!(fj.height() <= bound);
                achieved |= BigInt::from(d) == bound || fj.height() == bound;
            }
        }
        prop_assert!(achieved);

        // Raising one degree or one coefficient never shrinks the set.
        let mut higher = polys.clone();
        let last = higher.last().unwrap().mul(&IntPoly::x());
        *higher.last_mut().unwrap() = last;
        let grown = prime_set(&FamilySpec::new(higher).unwrap()).unwrap();
        prop_assert!(ps.primes.iter().all(|q| grown.primes.contains(q)));

        let mut taller = polys.clone();
        let last = taller.last().unwrap().mul_scalar(&BigInt::from(3));
        *taller.last_mut().unwrap() = last;
        let grown = prime_set(&FamilySpec::new(taller).unwrap()).unwrap();
        prop_assert!(ps.primes.iter().all(|q| grown.primes.contains(q)));
    }

    #[test]
    fn divisibility_patterns_match_member_by_member_division(
        u in prop::sample::select(vec![
            p("x-1"),
            p("x+1"),
            p("x^2+x+1"),
            p("x^2+1"),
            p("x^2-x+1"),
            p("x^2+x+2"),
        ]),
        family in affine_family(),
    ) {
        let n0 = family
            .exponent_threshold()
            .max(family.separation_threshold())
            .max(1);
        match family_divides(&u, &family) {
            Ok(FamilyDivisibility::All) => {
                for n in n0..n0 + 18 {
                    prop_assert!(u.divides(&family.eval(n).unwrap()), "n = {n}");
                }
            }
            Ok(FamilyDivisibility::Periodic { period, residues }) => {
                for n in n0..n0 + 3 * period as i64 {
                    let divides = u.divides(&family.eval(n).unwrap());
                    let listed = residues.contains(&(n as u64 % period));
                    prop_assert_eq!(divides, listed, "n = {}", n);
                }
            }
            // A finite or declined answer makes no claim at specific n.
            Ok(FamilyDivisibility::FinitelyMany) | Err(_) => {}
        }
    }
}
