mod common;

use common::rng;
use num_traits::Signed;
use proptest::prelude::*;
use rand::Rng;
use tclab::cohom1::{
    csc_locus, einstein_h, futaki_fiberwise, h_from_scalar, noncompact_csc, scalar_of_h,
    solve_compact_extremal, special_orbit_conditions, FamilyEntry, FiberData, OrbitType, Side,
};
use tclab::curvature::{fkt_einstein_residual, fkt_scalar, FiberWeight};
use tclab::exactalg::{
    int, parse_multi_ratfunc, rat, to_f64, MPoly, MultiRatFunc, Poly, RatFunc, Rational,
};
use tclab::polytope::catalog;
use tclab::potential::Potential;
use tclab::Error;

fn fiber(t: &[(u32, Rational, Rational)]) -> FiberData {
    FiberData::from_triples(t).unwrap()
}

fn sakane() -> FiberData {
    fiber(&[(2, rat(1, 2), int(1)), (2, rat(-1, 2), int(1))])
}

fn poly(c: &[Rational]) -> Poly {
    Poly::new(c.to_vec())
}

fn one_minus_x2() -> RatFunc {
    RatFunc::from_poly(Poly::from_ints(&[1, 0, -1]))
}

fn sakane_h() -> RatFunc {
    let num = &Poly::from_ints(&[1, 0, -1]) * &Poly::from_ints(&[7, 0, -1]);
    RatFunc::new(num, Poly::from_ints(&[8, 0, -2]))
}

/// Closed form of the Hirzebruch profile on `[-1, 1]`:
/// `h = (1 − x²)(N(x)) / (2(bx + a)(3a² − b²))`.
fn hirzebruch_h(a: &Rational, b: &Rational) -> RatFunc {
    let n = poly(&[
        int(6) * a * a * a - int(4) * a * b * b + b * b,
        int(6) * a * a * b - int(2) * b * b * b,
        int(2) * a * b * b - b * b,
    ]);
    let den = Poly::linear(b.clone(), a.clone()).scale(&(int(2) * (int(3) * a * a - b * b)));
    RatFunc::new(&Poly::from_ints(&[1, 0, -1]) * &n, den)
}

#[test]
fn scalar_of_h_examples() {
    let w = fiber(&[(2, int(0), int(1))]);
    assert_eq!(scalar_of_h(&w, &one_minus_x2()), RatFunc::constant(int(4)));
    assert_eq!(
        scalar_of_h(&sakane(), &sakane_h()),
        RatFunc::constant(int(6))
    );
    let cp2 = fiber(&[(2, rat(1, 2), int(0))]);
    let h = RatFunc::from_poly(Poly::from_ints(&[0, 2, -2]));
    assert_eq!(scalar_of_h(&cp2, &h), RatFunc::constant(int(12)));
}

#[test]
fn h_from_scalar_examples() {
    let w = fiber(&[(2, int(1), int(1))]);
    let h = h_from_scalar(&w, &Poly::zero(), &int(2), &int(0));
    assert_eq!(
        h,
        RatFunc::new(Poly::from_ints(&[0, 2, 1]), Poly::from_ints(&[1, 1]))
    );

    for a in [rat(1, 2), int(1), int(3)] {
        let w = fiber(&[(2, int(0), a.clone())]);
        let s = solve_compact_extremal(&w, (&int(-1), &int(1))).unwrap();
        assert_eq!(s.h, one_minus_x2());
        assert_eq!(s.alpha, int(0));
        assert_eq!(s.beta, int(2) / &a + int(2));
    }
}

fn random_fiber(seed: u64) -> FiberData {
    let mut r = rng(seed);
    let k = r.gen_range(1..=3);
    let t: Vec<(u32, Rational, Rational)> = (0..k)
        .map(|_| {
            (
                2 * r.gen_range(1..=2),
                rat(r.gen_range(-3..=3), 4),
                rat(r.gen_range(1..=9), 2),
            )
        })
        .collect();
    fiber(&t)
}

#[test]
fn scalar_round_trip() {
    let mut r = rng(77);
    for trial in 0..50 {
        let w = random_fiber(1000 + trial);
        let s = Poly::linear(rat(r.gen_range(-9..=9), 5), rat(r.gen_range(-9..=9), 2));
        let (e, f) = (rat(r.gen_range(-5..=5), 3), rat(r.gen_range(-5..=5), 7));
        let h = h_from_scalar(&w, &s, &e, &f);
        assert_eq!(scalar_of_h(&w, &h), RatFunc::from_poly(s), "trial {trial}");
    }
}

#[test]
fn profile_is_affine_in_scalar() {
    for trial in 0..20 {
        let w = random_fiber(2000 + trial);
        let (e, f) = (int(1), rat(1, 3));
        let h = |al: i64, be: i64| h_from_scalar(&w, &Poly::linear(int(al), int(be)), &e, &f);
        let h0 = h(0, 0);
        let lhs = &h(3, -2) - &h0;
        let rhs = &(&h(1, 0) - &h0).scale(&int(3)) + &(&h(0, 1) - &h0).scale(&int(-2));
        assert_eq!(lhs, rhs);
    }
}

fn assert_boundary(s: &tclab::cohom1::ExtremalSolution) {
    let (x0, x1) = (&s.interval[0], &s.interval[1]);
    let hd = s.h.derivative();
    assert_eq!(s.h.eval(x0), Some(int(0)));
    assert_eq!(s.h.eval(x1), Some(int(0)));
    assert_eq!(hd.eval(x0), Some(int(2)));
    assert_eq!(hd.eval(x1), Some(int(-2)));
    assert!(s.smooth_left && s.smooth_right);
    assert!(s.positivity.is_positive());
}

#[test]
fn hirzebruch_family() {
    for (a, b) in [
        (int(2), rat(1, 2)),
        (int(1), rat(1, 3)),
        (rat(3, 4), rat(-1, 2)),
        (int(5), int(3)),
    ] {
        let w = fiber(&[(2, b.clone(), a.clone())]);
        let s = solve_compact_extremal(&w, (&int(-1), &int(1))).unwrap();
        let den = int(3) * &a * &a - &b * &b;
        assert_eq!(s.alpha, int(6) * &b * (int(2) * &a - int(1)) / &den);
        assert_eq!(s.beta, int(6) * (&a - &b * &b + &a * &a) / &den);
        assert_eq!(s.h, hirzebruch_h(&a, &b));
        assert_boundary(&s);
        assert_eq!(scalar_of_h(&w, &s.h), RatFunc::from_poly(s.scalar()));
    }
    // frozen instance
    let s = solve_compact_extremal(&fiber(&[(2, rat(1, 2), int(2))]), (&int(-1), &int(1))).unwrap();
    assert_eq!(
        (s.alpha.clone(), s.beta.clone()),
        (rat(36, 47), rat(138, 47))
    );
}

#[test]
fn six_dimensional_family() {
    let six = |a: Rational, c: Rational| fiber(&[(2, rat(-1, 2), a), (2, rat(1, 2), c)]);
    let s = solve_compact_extremal(&six(int(1), int(1)), (&int(-1), &int(1))).unwrap();
    assert_eq!((s.alpha.clone(), s.beta.clone()), (int(0), int(6)));
    assert_eq!(s.h, sakane_h());
    assert_boundary(&s);

    // α = 240(a−c)(2ac−a−c)/D, β = 6N/D in fiber coordinates
    for (a, c) in [
        (int(2), int(3)),
        (rat(3, 2), rat(2, 3)),
        (rat(5, 4), int(1)),
    ] {
        let s = solve_compact_extremal(&six(a.clone(), c.clone()), (&int(-1), &int(1))).unwrap();
        let (a2, c2) = (&a * &a, &c * &c);
        let d = int(240) * &a2 * &c2 - int(20) * &a2 - int(16) * &a * &c - int(20) * &c2 + int(3);
        let n = int(80) * &a2 * &c2 + int(80) * &a2 * &c - int(20) * &a2
            + int(80) * &a * &c2
            + int(8) * &a * &c
            - int(12) * &a
            - int(20) * &c2
            - int(12) * &c
            + int(3);
        assert_eq!(
            s.alpha,
            int(240) * (&a - &c) * (int(2) * &a * &c - &a - &c) / &d
        );
        assert_eq!(s.beta, int(6) * n / &d);
        assert_boundary(&s);
    }
    let s = solve_compact_extremal(&six(int(2), int(3)), (&int(-1), &int(1))).unwrap();
    assert_eq!(
        (s.alpha.clone(), s.beta.clone()),
        (rat(-1680, 8287), rat(30066, 8287))
    );
}

#[test]
fn degenerate_and_large_parameter_limits() {
    // the fiber collapses at x = −1: the Fubini–Study limit has constant scalar curvature
    let w = fiber(&[(2, rat(1, 2), rat(1, 2))]);
    let s = solve_compact_extremal(&w, (&int(-1), &int(1))).unwrap();
    assert_eq!(s.alpha, int(0));
    assert_eq!(s.beta, int(6));
    assert_eq!(
        s.special_orbit_types[0],
        OrbitType::ProjectiveCollapse {
            entries: vec![0],
            complex_dim: 1
        }
    );
    assert_eq!(s.special_orbit_types[1], OrbitType::CircleCollapse);

    let mut prev = f64::INFINITY;
    for a in [10, 100, 1000] {
        let s =
            solve_compact_extremal(&fiber(&[(2, rat(1, 2), int(a))]), (&int(-1), &int(1))).unwrap();
        let sup = (0..=40)
            .map(|k| {
                let x = rat(k - 20, 20);
                to_f64(&(s.h.eval(&x).unwrap() - (int(1) - &x * &x))).abs()
            })
            .fold(0.0, f64::max);
        assert!(sup < prev);
        prev = sup;
    }
    assert!(prev < 1e-3);
}

#[test]
fn compact_errors() {
    let w = fiber(&[(2, int(1), int(0))]);
    assert!(matches!(
        solve_compact_extremal(&w, (&int(-1), &int(1))),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        solve_compact_extremal(&sakane(), (&int(1), &int(-1))),
        Err(Error::EmptyInterval(_, _))
    ));
}

#[test]
fn special_orbit_examples() {
    let ok = fiber(&[(2, rat(1, 2), int(0))]);
    let r = special_orbit_conditions(&ok, &int(0), Side::Left, &[0]).unwrap();
    assert!(r.satisfied);
    assert_eq!(r.constraints[0].requirement, "b_1 = 1/2");

    let bad = fiber(&[(2, int(1), int(0))]);
    assert!(
        !special_orbit_conditions(&bad, &int(0), Side::Left, &[0])
            .unwrap()
            .satisfied
    );

    let r = special_orbit_conditions(&sakane(), &int(-1), Side::Left, &[]).unwrap();
    assert!(r.satisfied && r.constraints.is_empty());
    assert_eq!(r.h_conditions.len(), 2);

    // several entries collapsing together: Σ d_j/b_j = (k² − 1)/2 with k − 1 = Σ d_j
    let two = fiber(&[(2, rat(1, 3), int(0)), (2, rat(1, 3), int(0))]);
    let r = special_orbit_conditions(&two, &int(0), Side::Left, &[0, 1]).unwrap();
    assert_eq!(r.constraints[0].requirement, "sum d_j/|b_j| = 12");
    assert!(r.satisfied);
    let three = fiber(&[
        (2, rat(1, 3), int(0)),
        (2, rat(1, 3), int(0)),
        (2, rat(1, 3), int(0)),
    ]);
    assert!(
        !special_orbit_conditions(&three, &int(0), Side::Left, &[0, 1, 2])
            .unwrap()
            .satisfied
    );
    let three = fiber(&[
        (2, rat(1, 4), int(0)),
        (2, rat(1, 4), int(0)),
        (2, rat(1, 4), int(0)),
    ]);
    assert!(
        special_orbit_conditions(&three, &int(0), Side::Left, &[0, 1, 2])
            .unwrap()
            .satisfied
    );
    let right = fiber(&[(2, rat(-1, 2), int(1))]);
    assert!(
        special_orbit_conditions(&right, &int(2), Side::Right, &[0])
            .unwrap()
            .satisfied
    );

    assert!(matches!(
        special_orbit_conditions(&sakane(), &int(0), Side::Left, &[0]),
        Err(Error::Precondition(_))
    ));
}

fn one_param(d: u32, b: Rational, a: MPoly) -> FamilyEntry {
    FamilyEntry { d, b, a }
}

#[test]
fn csc_locus_examples() {
    // six-dim with A = ((a + 1) ± x)/2 in polytope parameters
    let half = |i: usize| &MPoly::var(2, i).scale(&rat(1, 2)) + &MPoly::constant(2, rat(1, 2));
    let fam = vec![
        one_param(2, rat(-1, 2), half(0)),
        one_param(2, rat(1, 2), half(1)),
    ];
    let loc = csc_locus(&fam, &["a", "c"], (&int(-1), &int(1))).unwrap();
    let eqs: Vec<&str> = loc.components.iter().map(|c| c.equation.as_str()).collect();
    assert!(eqs.contains(&"c = a"), "{eqs:?}");
    assert!(eqs.contains(&"c = 1/a"), "{eqs:?}");
    assert!(loc.components.iter().all(|c| c.feasible));
    assert_eq!(loc.verdict, "CSC locus found");
    assert_eq!(loc.residual, "1");

    let hirz = vec![one_param(2, rat(1, 2), MPoly::var(1, 0))];
    let loc = csc_locus(&hirz, &["a"], (&int(-1), &int(1))).unwrap();
    assert_eq!(loc.components.len(), 1);
    assert_eq!(loc.components[0].equation, "a = 1/2");
    assert!(!loc.components[0].feasible);
    assert_eq!(loc.verdict, "no CSC");

    let flat = vec![one_param(2, int(0), MPoly::var(1, 0))];
    let loc = csc_locus(&flat, &["a"], (&int(-1), &int(1))).unwrap();
    assert!(loc.alpha_identically_zero);

    let three = vec![one_param(2, rat(1, 2), MPoly::var(3, 0))];
    assert!(matches!(
        csc_locus(&three, &["a", "b", "c"], (&int(-1), &int(1))),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn einstein_examples() {
    let e = einstein_h(&sakane(), &int(1), (&int(-1), &int(1))).unwrap();
    assert_eq!(e.d, int(0));
    assert_eq!(e.h, sakane_h());
    assert!(e.smooth_left && e.smooth_right);

    let e = einstein_h(&fiber(&[(2, int(0), int(1))]), &int(1), (&int(-1), &int(1))).unwrap();
    assert_eq!(e.h, one_minus_x2());

    assert!(matches!(
        einstein_h(&fiber(&[(2, int(0), int(2))]), &int(1), (&int(-1), &int(1))),
        Err(Error::Inconsistent(_))
    ));
    assert!(matches!(
        einstein_h(
            &fiber(&[(2, rat(1, 2), int(1)), (2, rat(1, 2), int(2))]),
            &int(1),
            (&int(-1), &int(1))
        ),
        Err(Error::Inconsistent(_))
    ));
}

#[test]
fn einstein_profile_solves_fiberwise_equations() {
    let w = sakane();
    let e = einstein_h(&w, &int(1), (&int(-1), &int(1))).unwrap();
    let fxx = &e.h.recip() - &one_minus_x2().recip();
    let base = Potential::with_fxx(
        catalog("cp1", &[]).unwrap(),
        0,
        MultiRatFunc::from_ratfunc(&fxx, 1, 0),
    )
    .unwrap();
    let weight = FiberWeight::from_cohom1(&w);
    for x in [rat(-4, 5), rat(-1, 3), int(0), rat(1, 7), rat(2, 3)] {
        let (a, b) =
            fkt_einstein_residual(&base, &weight, &int(1), std::slice::from_ref(&x)).unwrap();
        assert!(a.iter().flatten().all(|v| *v == int(0)));
        assert!(b.iter().all(|v| *v == int(0)));
        assert_eq!(fkt_scalar(&base, &weight, &[x]).unwrap(), int(6));
    }
    // the literal correction matches the one read off the profile
    assert_eq!(
        MultiRatFunc::from_ratfunc(&fxx, 1, 0),
        parse_multi_ratfunc("1/(7-x^2)", 1).unwrap()
    );
}

#[test]
fn noncompact_examples() {
    let w = fiber(&[(2, int(1), int(1))]);
    let s = noncompact_csc(&w, &int(0)).unwrap();
    assert_eq!(
        s.h,
        RatFunc::new(Poly::from_ints(&[0, 2, 1]), Poly::from_ints(&[1, 1]))
    );
    assert!(s.coefficients_nonnegative);
    assert_eq!(s.orbit_type, OrbitType::CircleCollapse);

    assert!(matches!(
        noncompact_csc(&w, &int(1)),
        Err(Error::Rejected(_))
    ));

    let bundle = fiber(&[(2, rat(1, 2), int(0)), (2, int(1), int(1))]);
    let s = noncompact_csc(&bundle, &int(0)).unwrap();
    assert_eq!(
        s.orbit_type,
        OrbitType::ProjectiveCollapse {
            entries: vec![0],
            complex_dim: 1
        }
    );
    assert!(s.coefficients_nonnegative);

    let neg = noncompact_csc(&w, &int(-3)).unwrap();
    assert!(neg.coefficients_nonnegative);
    assert_eq!(scalar_of_h(&w, &neg.h), RatFunc::constant(int(-3)));

    assert!(matches!(
        noncompact_csc(&fiber(&[(2, int(-1), int(1))]), &int(0)),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn futaki_examples() {
    assert_eq!(futaki_fiberwise(&sakane(), (&int(-1), &int(1))), int(0));
    let pq = fiber(&[(2, rat(-1, 2), int(1)), (2, rat(-1, 2), int(1))]);
    assert_eq!(futaki_fiberwise(&pq, (&int(-1), &int(1))), rat(-2, 3));
    assert_eq!(
        futaki_fiberwise(&fiber(&[(2, int(0), int(1))]), (&int(-1), &int(1))),
        int(0)
    );
}

#[test]
fn fiber_data_serde_and_strings() {
    let w: FiberData = "d=2,b=1/2,a=1;d=2,b=-1/2,a=1".parse().unwrap();
    assert_eq!(w, sakane());
    let json = serde_json::to_string(&w).unwrap();
    assert_eq!(serde_json::from_str::<FiberData>(&json).unwrap(), w);
    assert!(serde_json::from_str::<FiberData>("[]").is_err());
    assert!("d=3,b=1,a=1".parse::<FiberData>().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn extremal_solutions_meet_boundary_conditions(
        a in 1i64..=12, b in -5i64..=5, c in 1i64..=12, d in -5i64..=5,
    ) {
        // keep every A_j positive on [−1, 1]
        let (a, c) = (rat(a, 2) + rat(d.abs().max(b.abs()), 4) + rat(1, 8), rat(c, 2) + rat(d.abs(), 4) + rat(1, 8));
        let w = fiber(&[(2, rat(b, 4), a), (2, rat(d, 4), c)]);
        match solve_compact_extremal(&w, (&int(-1), &int(1))) {
            Ok(s) => {
                assert_boundary(&s);
                prop_assert_eq!(scalar_of_h(&w, &s.h), RatFunc::from_poly(s.scalar()));
            }
            Err(Error::Positivity(_)) | Err(Error::Singular(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn hirzebruch_matches_closed_form(an in 1i64..=20, bn in -9i64..=9) {
        let b = rat(bn, 10);
        let a = b.abs() + rat(an, 10);
        let w = fiber(&[(2, b.clone(), a.clone())]);
        let s = solve_compact_extremal(&w, (&int(-1), &int(1))).unwrap();
        prop_assert_eq!(s.h, hirzebruch_h(&a, &b));
    }
}
