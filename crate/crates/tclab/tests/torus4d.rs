mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use num_dual::DualNum;
use proptest::prelude::*;
use rand::Rng;
use tclab::torus4d::*;
use tclab::Error;

/// Derived Einstein constant of the Page metric in the normalization used by the catalog.
const PAGE_LAMBDA: f64 = 1.0;

fn orbit(pairs: &[(i64, i64)]) -> OrbitData {
    OrbitData::new(pairs.to_vec()).unwrap()
}

/// Counterclockwise fan of a Hirzebruch surface `F_a`.
fn hirzebruch_fan(a: i64) -> Vec<(i64, i64)> {
    vec![(1, 0), (0, 1), (-1, a), (0, -1)]
}

/// Toric blowup at the corner between `i` and `i + 1`.
fn blow_up(fan: &mut Vec<(i64, i64)>, i: usize) {
    let k = fan.len();
    let (u, v) = (fan[i], fan[(i + 1) % k]);
    fan.insert(i + 1, (u.0 + v.0, u.1 + v.1));
}

#[test]
fn orbit_examples() {
    let s4 = orbit_invariants(&orbit(&[(1, 0), (0, 1)]));
    assert_eq!(
        (s4.chi, s4.tau, s4.spin, s4.hitchin_thorpe_pass),
        (2, 0, true, true)
    );

    let cp2 = orbit_invariants(&orbit(&[(0, 1), (1, 0), (1, 1)]));
    assert_eq!((cp2.chi, cp2.tau.abs(), cp2.spin), (3, 1, false));
    assert!(cp2.hitchin_thorpe_pass);

    let page = orbit_invariants(&orbit(&[(0, 1), (1, 1), (0, 1), (1, 0)]));
    assert_eq!((page.chi, page.tau, page.spin), (4, 0, false));
    assert!(page.hitchin_thorpe_pass);

    let s2s2 = orbit_invariants(&catalog_orbit("s2xs2").unwrap());
    assert_eq!((s2s2.chi, s2s2.tau, s2s2.spin), (4, 0, true));

    // the sign of a pair is immaterial once normalized
    let flipped = orbit_invariants(&orbit(&[(0, -1), (-1, 0), (1, 1)]));
    assert_eq!(flipped, cp2);
}

#[test]
fn orbit_validation_and_parsing() {
    assert!(matches!(
        OrbitData::new(vec![(1, 0)]),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        OrbitData::new(vec![(2, 0), (0, 1)]),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        OrbitData::new(vec![(1, 0), (1, 2), (0, 1)]),
        Err(Error::InvalidInput(_))
    ));

    let d: OrbitData = "(1,0); (0,1)".parse().unwrap();
    assert_eq!(d.pairs(), &[(1, 0), (0, 1)]);
    assert_eq!(d.to_string(), "(1,0);(0,1)");
    assert!(matches!(
        "(1,0);(0 1)".parse::<OrbitData>(),
        Err(Error::Parse { pos: 6, .. })
    ));
    assert!("(1,0);(x,1)".parse::<OrbitData>().is_err());

    let json = serde_json::to_string(&d).unwrap();
    assert_eq!(json, "[[1,0],[0,1]]");
    assert_eq!(serde_json::from_str::<OrbitData>(&json).unwrap(), d);
    assert!(serde_json::from_str::<OrbitData>("[[1,0],[1,2]]").is_err());
}

#[test]
fn hitchin_thorpe_gate_matches_blowup_bound() {
    let mut rng = common::rng(44);
    for _ in 0..50 {
        let (k, l) = (rng.gen_range(0..30), rng.gen_range(0..30));
        let (chi, tau) = (2 + k + l, k - l);
        assert_eq!(
            hitchin_thorpe(chi, tau),
            blowup_corollary(k, l),
            "k={k} l={l}"
        );
    }
    // boundary of the bound: ℂP² # 9ℂP̄² and 4ℂP̄²
    assert!(!blowup_corollary(1, 9) && !hitchin_thorpe(12, -8));
    assert!(!blowup_corollary(0, 4) && !hitchin_thorpe(6, -4));
    assert!(blowup_corollary(1, 8));
}

#[test]
fn catalog_metric_entries() {
    let s4 = metric_catalog("s4").unwrap();
    let (r, t) = (0.7, 0.4);
    let h = (s4.h)(r.into(), t.into());
    assert!((h[0].re - (r.sin() * t.sin()).powi(2)).abs() < 1e-15);
    assert!((h[2].re - (r.sin() * t.cos()).powi(2)).abs() < 1e-15);
    assert_eq!(h[1].re, 0.0);

    let cp2 = metric_catalog("cp2").unwrap();
    let h = (cp2.h)(r.into(), t.into());
    let expected = -r.sin().powi(4) * (t.sin() * t.cos()).powi(2);
    assert!((h[1].re - expected).abs() < 1e-15);

    let nu = page_nu();
    assert!(nu > 0.28 && nu < 0.29);
    let lhs = 4.0 * nu * (3.0 + nu * nu) / (3.0 + 6.0 * nu * nu - nu.powi(4));
    assert!((lhs - 1.0).abs() < 1e-13);

    assert!(matches!(metric_catalog("k3"), Err(Error::UnknownName(_))));
}

#[test]
fn catalog_metrics_are_einstein() {
    for name in ["s4", "s2xs2", "cp2"] {
        let tm = metric_catalog(name).unwrap();
        let r = torus_einstein_residual(&tm, 32, Scheme::Exact).unwrap();
        assert!(r.max < 1e-8, "{name}: {r:?}");
        assert_eq!(r.max, r.fiber.max(r.base));
    }
    let page = metric_catalog("page").unwrap();
    assert!((page.lambda - PAGE_LAMBDA).abs() < 1e-9, "{}", page.lambda);
    let (x, y) = (1.1, 2.3);
    assert!((trace_lambda(&page, x, y).unwrap() - PAGE_LAMBDA).abs() < 1e-9);
    let r = torus_einstein_residual(&page, 64, Scheme::Exact).unwrap();
    assert!(r.max < 1e-6, "{r:?}");
}

#[test]
fn wrong_constant_is_detected() {
    let mut tm = metric_catalog("s4").unwrap();
    tm.lambda = 2.9;
    let r = torus_einstein_residual(&tm, 8, Scheme::Exact).unwrap();
    assert!(r.max > 1e-2);
}

#[test]
fn finite_differences_converge_on_s4() {
    let tm = metric_catalog("s4").unwrap();
    let fd = |k| {
        torus_einstein_residual(
            &tm,
            k,
            Scheme::FiniteDifference {
                relative_step: None,
            },
        )
        .unwrap()
        .max
    };
    let (r8, r16, r32) = (fd(8), fd(16), fd(32));
    assert!(r8 / r16 >= 8.0, "{r8} {r16}");
    assert!(r16 / r32 >= 8.0, "{r16} {r32}");
    let fixed = torus_einstein_residual(
        &tm,
        16,
        Scheme::FiniteDifference {
            relative_step: Some(1e-3),
        },
    )
    .unwrap();
    assert!(fixed.max < 1e-6);
    assert!(torus_einstein_residual(
        &tm,
        4,
        Scheme::FiniteDifference {
            relative_step: Some(-1.0)
        }
    )
    .is_err());
}

#[test]
fn non_metric_samples_are_rejected() {
    let mut tm = metric_catalog("s2xs2").unwrap();
    tm.h = Arc::new(|r, t| [-(r.sin().powi(2)), 0.0.into(), t.sin().powi(2)]);
    assert!(matches!(
        torus_einstein_residual(&tm, 4, Scheme::Exact),
        Err(Error::NotMetricPoint(_))
    ));
    assert!(torus_einstein_residual(&tm, 0, Scheme::Exact).is_err());
}

#[test]
fn rho_q_is_holomorphic_for_einstein_metrics() {
    let s4 = isothermal_catalog("s4").unwrap();
    let r = rhoq_holomorphicity(&s4, 32).unwrap();
    assert!(r.residual < 1e-6, "{r:?}");

    let flat = IsothermalMetric {
        name: "flat".into(),
        omega: Arc::new(|_, _| 1.0.into()),
        h: Arc::new(|_, _| [1.0.into(), 0.0.into(), 1.0.into()]),
        domain: s4.domain,
    };
    let r = rhoq_holomorphicity(&flat, 16).unwrap();
    assert_eq!((r.residual, r.max_abs_rho_q), (0.0, 0.0));

    // scale ρ by 1 + R/10, with R = 2 atan(eˣ)
    let inner = s4.h.clone();
    let perturbed = IsothermalMetric {
        name: "perturbed".into(),
        h: Arc::new(move |x, y| {
            let f = x.exp().atan() * 0.2 + 1.0;
            inner(x, y).map(|v| v * f)
        }),
        ..s4.clone()
    };
    let r = rhoq_holomorphicity(&perturbed, 32).unwrap();
    assert!(r.residual > 1e-3, "{r:?}");

    assert!(matches!(
        isothermal_catalog("page"),
        Err(Error::Unsupported(_))
    ));
    assert!(matches!(
        isothermal_catalog("x"),
        Err(Error::UnknownName(_))
    ));
}

#[test]
fn surface_gravity_on_bolts() {
    let s4 = metric_catalog("s4").unwrap();
    let g = surface_gravity(&s4, Side::ThetaMin, (1, 0), 17).unwrap();
    assert!((g.mean - 1.0).abs() < 1e-6);
    assert!(g.spread < 1e-6);
    assert_eq!(g.samples.len(), 17);
    assert!(g.samples.iter().all(|s| s.1 == 0.0));

    let s2s2 = metric_catalog("s2xs2").unwrap();
    let g = surface_gravity(&s2s2, Side::RMin, (1, 0), 5).unwrap();
    assert!((g.mean - 1.0).abs() < 1e-12);

    assert!(matches!(
        surface_gravity(&s4, Side::ThetaMin, (0, 1), 5),
        Err(Error::NotDegenerate(_))
    ));
    // R = 0 on S⁴ collapses to a point
    assert!(matches!(
        surface_gravity(&s4, Side::RMin, (1, 0), 5),
        Err(Error::Precondition(_))
    ));
    assert_eq!("theta_min".parse::<Side>().unwrap(), Side::ThetaMin);
    assert!("left".parse::<Side>().is_err());
}

#[test]
fn bolt_sides_recover_the_orbit_data() {
    for name in TORUS_CATALOG {
        let tm = metric_catalog(name).unwrap();
        let mut found: Vec<(i64, i64)> = bolt_sides(&tm).into_iter().map(|s| s.1).collect();
        let mut listed = catalog_orbit(name).unwrap().normalized();
        found.sort();
        listed.sort();
        assert_eq!(found, listed, "{name}");
        for (side, pair) in bolt_sides(&tm) {
            let g = surface_gravity(&tm, side, pair, 9).unwrap();
            assert!((g.mean - 1.0).abs() < 1e-9, "{name} {side}: {}", g.mean);
        }
    }
}

#[test]
fn bolt_area_identity_examples() {
    let s2s2 = metric_catalog("s2xs2").unwrap();
    let b = bolt_area_identity(&s2s2, 128).unwrap();
    let target = 16.0 * PI * PI;
    assert!((b.a_total - target).abs() / target < 1e-6);
    assert!((b.b_total - target).abs() / target < 1e-6);
    assert!(b.relative_error < 1e-6);

    let s4 = metric_catalog("s4").unwrap();
    let b = bolt_area_identity(&s4, 128).unwrap();
    assert!(b.relative_error < 1e-6, "{b:?}");
    assert!((b.a_total - 8.0 * PI * PI).abs() < 1e-6);

    // round factors of radii 1 and 2
    let scaled = TorusMetric {
        name: "scaled".into(),
        b: Arc::new(|_, _| 4.0.into()),
        h: Arc::new(|r, t| [r.sin().powi(2), 0.0.into(), t.sin().powi(2) * 4.0]),
        ..s2s2
    };
    let b = bolt_area_identity(&scaled, 128).unwrap();
    assert!(b.relative_error > 0.1, "{b:?}");

    let cp2 = metric_catalog("cp2").unwrap();
    assert!(matches!(
        bolt_area_identity(&cp2, 64),
        Err(Error::Precondition(_))
    ));
    assert!(bolt_area_identity(&s4, 63).is_err());
}

fn random_fan(seed: u64) -> (Vec<(i64, i64)>, bool) {
    let mut rng = common::rng(seed);
    let (mut fan, spin) = if rng.gen_bool(0.2) {
        (vec![(1, 0), (0, 1), (-1, -1)], false)
    } else {
        let a = rng.gen_range(0..4);
        (hirzebruch_fan(a), a % 2 == 0)
    };
    let blowups = rng.gen_range(0..10);
    for _ in 0..blowups {
        let i = rng.gen_range(0..fan.len());
        blow_up(&mut fan, i);
    }
    (fan, spin && blowups == 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn toric_fans_have_closed_form_invariants(seed in 0u64..10_000) {
        let (fan, spin) = random_fan(seed);
        let k = fan.len() as i64;
        let inv = orbit_invariants(&OrbitData::new(fan).unwrap());
        prop_assert_eq!(inv.chi, k);
        prop_assert_eq!(inv.tau, 4 - k);
        prop_assert_eq!(inv.spin, spin);
        // ℂP² # (k − 3)ℂP̄², or S² × S² when spin
        if !spin {
            prop_assert_eq!(inv.hitchin_thorpe_pass, blowup_corollary(1, k - 3));
        }
    }

    #[test]
    fn reversal_flips_the_signature(seed in 0u64..10_000, flips in prop::collection::vec(any::<bool>(), 16)) {
        let (fan, _) = random_fan(seed);
        let signed: Vec<(i64, i64)> = fan
            .iter()
            .zip(&flips)
            .map(|(&(m, n), &f)| if f { (-m, -n) } else { (m, n) })
            .collect();
        let d = OrbitData::new(signed).unwrap();
        prop_assert_eq!(orbit_invariants(&d.reversed()).tau, -orbit_invariants(&d).tau);
    }
}
