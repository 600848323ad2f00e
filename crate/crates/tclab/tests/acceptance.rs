//! End-to-end acceptance checks, one line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as failures but do not fail the run.

mod common;

use std::f64::consts::PI;
use std::panic;
use std::time::Instant;

use common::{catalog_params, interior_points, rng};
use rand::Rng;
use tclab::cohom1::{
    einstein_h, futaki_fiberwise, h_from_scalar, scalar_of_h, solve_compact_extremal, FiberData,
};
use tclab::curvature::{
    abreu_scalar, abreu_scalar_simplified, adjugate_divergence, derdzinski_check,
    einstein_residual, extremal_fit, hermitian_einstein_lambda, hermitian_einstein_toric_residual,
};
use tclab::exactalg::{
    int, parse_multi_ratfunc, rat, sturm_sign_certificate, to_f64, Poly, RatFunc, Rational,
    SignCertificate,
};
use tclab::hermitian::{hermitian_scalar, hirzebruch_hermitian_family, FiberProfile, ProfileEntry};
use tclab::liealg::{
    diagonalizability_verdict, equivalence_vectors, parse_orbit, standard_decomposition,
    AlgElement, RepType,
};
use tclab::polytope::catalog;
use tclab::potential::{potential_catalog, POTENTIAL_NAMES};
use tclab::torus4d::{
    blowup_corollary, bolt_area_identity, metric_catalog, orbit_invariants, surface_gravity,
    torus_einstein_residual, OrbitData, Scheme, Side,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

const KNOWN_FAILURES: &[u32] = &[3];

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fiber(t: &[(u32, Rational, Rational)]) -> FiberData {
    FiberData::from_triples(t).unwrap()
}

fn is_zero_matrix(m: &[Vec<Rational>]) -> bool {
    m.iter().flatten().all(|v| *v == int(0))
}

fn abreu_identity() -> Outcome {
    let mut count = 0;
    for (k, name) in POTENTIAL_NAMES.iter().enumerate() {
        let pot = potential_catalog(name, &catalog_params(name)).map_err(err)?;
        for x in interior_points(pot.polytope(), 20, 900 + k as u64) {
            let (s, t) = (
                abreu_scalar(&pot, &x).map_err(err)?,
                abreu_scalar_simplified(&pot, &x).map_err(err)?,
            );
            ensure(s == t, format!("{name}: {s} ≠ {t}"))?;
            let div = adjugate_divergence(&pot, &x).map_err(err)?;
            ensure(
                div.iter().all(|v| *v == int(0)),
                format!("{name}: nonzero adjugate divergence"),
            )?;
            count += 1;
        }
    }
    Ok(format!("{count} exact comparisons"))
}

fn blowup_family() -> Outcome {
    for a in [rat(1, 2), int(1), rat(2, 1)] {
        let pot = potential_catalog("blowup1", std::slice::from_ref(&a)).map_err(err)?;
        let q = int(3) * &a * &a + int(6) * &a + int(2);
        let c0 = int(3) * &a * &a * &a + int(9) * &a * &a + int(7) * &a + int(2);
        let expected = parse_multi_ratfunc(
            &format!("1/2*1/(x-({a})-1) + ({a})/(({a})*x^2-({q})*x+({c0}))"),
            2,
        )
        .map_err(err)?;
        ensure(
            pot.correction()[0][0] == expected,
            format!("a = {a}: f_xx = {}", pot.correction()[0][0]),
        )?;
        let fit = extremal_fit(&pot, &interior_points(pot.polytope(), 4, 60)).map_err(err)?;
        let alpha = int(-12) * &a / &q;
        let beta = int(6) * (&a * &a + int(4) * &a + int(2)) / &q;
        ensure(
            fit.alpha == vec![alpha.clone(), int(0)] && fit.beta == beta,
            format!("a = {a}: S = {:?}x + {}", fit.alpha, fit.beta),
        )?;
    }
    let limit = solve_compact_extremal(
        &tclab::potential::catalog::blowup1_fiber(&int(0)).map_err(err)?,
        (&int(-1), &int(1)),
    )
    .map_err(err)?;
    ensure(limit.alpha == int(0), format!("a = 0: α = {}", limit.alpha))?;
    Ok(format!(
        "a ∈ {{1/2, 1, 2}} exact; a = 0 gives constant S = {}",
        limit.beta
    ))
}

fn page_conformal() -> Outcome {
    let pot = potential_catalog("blowup1", &[int(1)]).map_err(err)?;
    let sample = interior_points(pot.polytope(), 5, 70);
    let fit = extremal_fit(&pot, &sample).map_err(err)?;
    ensure(
        fit.alpha == vec![rat(-12, 11), int(0)] && fit.beta == rat(42, 11),
        "scalar curvature at a = 1 is not −12x/11 + 42/11",
    )?;
    let d = derdzinski_check(&pot, &fit.alpha, &fit.beta, &sample).map_err(err)?;
    let lambda = hermitian_einstein_lambda(&pot, &fit.alpha, &fit.beta, &sample[0]).map_err(err)?;
    let mut worst = 0.0f64;
    for x in &sample[1..] {
        let r = hermitian_einstein_toric_residual(&pot, &fit.alpha, &fit.beta, &lambda, x)
            .map_err(err)?;
        worst = worst.max(
            r.iter()
                .flatten()
                .map(|v| to_f64(v).abs())
                .fold(0.0, f64::max),
        );
    }

    // the same checks at a rational approximation of the root near 0.9158
    let star =
        potential_catalog("blowup1", &[rat(915_778_840_097, 1_000_000_000_000)]).map_err(err)?;
    let pts = interior_points(star.polytope(), 5, 71);
    let sfit = extremal_fit(&star, &pts).map_err(err)?;
    let sl = hermitian_einstein_lambda(&star, &sfit.alpha, &sfit.beta, &pts[0]).map_err(err)?;
    let mut star_worst = 0.0f64;
    for x in &pts[1..] {
        let r = hermitian_einstein_toric_residual(&star, &sfit.alpha, &sfit.beta, &sl, x)
            .map_err(err)?;
        star_worst = star_worst.max(
            r.iter()
                .flatten()
                .map(|v| to_f64(v).abs())
                .fold(0.0, f64::max),
        );
    }
    let detail = format!(
        "a = 1: S exact, functional constant = {}, residual = {worst:.3e}; \
         a ≈ 0.915778840097: residual = {star_worst:.3e}",
        d.is_constant
    );
    if d.is_constant && worst < 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sakane() -> Outcome {
    let pot = potential_catalog("sakane6", &[]).map_err(err)?;
    for x in [
        vec![int(0), int(0), int(0)],
        vec![rat(1, 3), rat(-1, 2), rat(1, 5)],
        vec![rat(-1, 2), rat(1, 4), rat(-1, 3)],
    ] {
        ensure(
            is_zero_matrix(&einstein_residual(&pot, &int(1), &x).map_err(err)?),
            "nonzero Einstein residual",
        )?;
    }
    let w = fiber(&[(2, rat(1, 2), int(1)), (2, rat(-1, 2), int(1))]);
    let e = einstein_h(&w, &int(1), (&int(-1), &int(1))).map_err(err)?;
    let expected = RatFunc::new(
        &Poly::from_ints(&[1, 0, -1]) * &Poly::from_ints(&[7, 0, -1]),
        Poly::from_ints(&[8, 0, -2]),
    );
    ensure(e.h == expected, format!("h = {}", e.h))?;
    Ok("zero residual at 3 points; h = (1−x²)(7−x²)/(2(4−x²))".into())
}

fn six_dimensional() -> Outcome {
    let six = |a: &Rational, c: &Rational| {
        solve_compact_extremal(
            &tclab::potential::catalog::sixdim_fiber(a, c).unwrap(),
            (&int(-1), &int(1)),
        )
    };
    let printed = |a: &Rational, c: &Rational| {
        let (a2, c2) = (a * a, c * c);
        let d = int(30) * &a2 * c
            + int(15) * &a2 * &c2
            + int(10) * &a2
            + int(16) * a
            + int(56) * a * c
            + int(30) * a * &c2
            + int(4)
            + int(16) * c
            + int(10) * &c2;
        let alpha = int(60) * (a - c) * (a * c - int(1)) / &d;
        let beta = int(6)
            * (int(10) * &a2
                + int(26) * a
                + int(20) * a * &c2
                + int(10) * &c2
                + int(20) * &a2 * c
                + int(62) * a * c
                + int(8)
                + int(26) * c
                + int(5) * &a2 * &c2)
            / &d;
        (alpha, beta)
    };
    let mut r = rng(5);
    for _ in 0..5 {
        let a = int(1) + rat(r.gen_range(1..=20), r.gen_range(1..=6));
        let c = int(1) + rat(r.gen_range(1..=20), r.gen_range(1..=6));
        let s = six(&a, &c).map_err(err)?;
        let (alpha, beta) = printed(&a, &c);
        ensure(
            s.alpha == alpha && s.beta == beta,
            format!("(a, c) = ({a}, {c}): α = {}, β = {}", s.alpha, s.beta),
        )?;
    }
    for (a, c) in [
        (int(3), int(3)),
        (rat(5, 2), rat(5, 2)),
        (int(4), rat(1, 4)),
        (rat(2, 3), rat(3, 2)),
    ] {
        let s = six(&a, &c).map_err(err)?;
        ensure(s.alpha == int(0), format!("α ≠ 0 at ({a}, {c})"))?;
    }
    let s = six(&int(1), &int(1)).map_err(err)?;
    ensure(s.beta == int(6), format!("β(1,1) = {}", s.beta))?;
    Ok("5 random (a, c) match; α = 0 on a = c and ac = 1; β(1,1) = 6".into())
}

fn hermitian_families() -> Outcome {
    let mut checked = 0;
    for q in [0i64, -1] {
        for k in -9..=9 {
            let l = rat(k, 10);
            let m = hirzebruch_hermitian_family(q, &l);
            let inside = rat(k.abs(), 10) + rat(q.abs(), 2) < int(1);
            ensure(
                m.valid == inside,
                format!("q = {q}, l = {l}: valid = {}", m.valid),
            )?;
            if !inside {
                continue;
            }
            let p = FiberProfile::new(vec![ProfileEntry {
                d: 2,
                a: m.a1.clone(),
                b: m.b.clone(),
            }])
            .map_err(err)?;
            ensure(
                hermitian_scalar(&p, &m.h) == RatFunc::constant(int(6)),
                format!("q = {q}, l = {l}: S ≠ 6"),
            )?;
            checked += 1;
        }
    }
    ensure(
        [int(0), rat(1, 4), rat(-1, 2)]
            .iter()
            .all(|l| !hirzebruch_hermitian_family(-2, l).valid),
        "q = −2 accepted",
    )?;
    let page = hirzebruch_hermitian_family(-1, &int(0));
    let expected = RatFunc::new(
        Poly::from_ints(&[7, 0, -8, 0, 1]),
        Poly::from_ints(&[8, 0, -2]),
    );
    ensure(page.h == expected, format!("Page h = {}", page.h))?;
    Ok(format!(
        "{checked} members with S ≡ 6; q = −2 rejected; Page h exact"
    ))
}

fn futaki() -> Outcome {
    for name in ["cp2", "cp1xcp1", "hexagon"] {
        let f = catalog(name, &[]).map_err(err)?.futaki_toric();
        ensure(f.iter().all(|c| *c == int(0)), format!("{name}: {f:?}"))?;
    }
    for a in [rat(1, 2), int(1), int(2)] {
        let f = catalog("blowup1", std::slice::from_ref(&a))
            .map_err(err)?
            .futaki_toric();
        ensure(
            f.iter().any(|c| *c != int(0)),
            format!("blowup1({a}) vanishes"),
        )?;
    }
    let sak = fiber(&[(2, rat(1, 2), int(1)), (2, rat(-1, 2), int(1))]);
    let pq = fiber(&[(2, rat(-1, 2), int(1)), (2, rat(-1, 2), int(1))]);
    let (fs, fp) = (
        futaki_fiberwise(&sak, (&int(-1), &int(1))),
        futaki_fiberwise(&pq, (&int(-1), &int(1))),
    );
    ensure(
        fs == int(0) && fp != int(0),
        format!("fiberwise: {fs}, {fp}"),
    )?;
    Ok(format!(
        "toric zero/nonzero as expected; fiberwise (1,1) = {fp}"
    ))
}

fn diagonalizability() -> Outcome {
    for n in 3..=5usize {
        let d = standard_decomposition("stiefel", &[n]).map_err(err)?;
        let z = &equivalence_vectors(&d, (0, 1)).map_err(err)?[0].vector;
        ensure(
            *z == AlgElement::e(n + 1, 1, 2).scale(&int(-(n as i64 - 1))),
            format!("stiefel({n}): Z = {z}"),
        )?;
        ensure(
            diagonalizability_verdict(&d).map_err(err)?.diagonalizable,
            format!("stiefel({n}) not diagonalizable"),
        )?;
    }
    for (n1, n2) in [(2, 2), (2, 3)] {
        let v = diagonalizability_verdict(&standard_decomposition("flag", &[n1, n2]).map_err(err)?)
            .map_err(err)?;
        ensure(
            !v.diagonalizable && v.verdict == "not diagonalizable by this method",
            format!("flag({n1},{n2}): {}", v.verdict),
        )?;
    }
    let su3 = diagonalizability_verdict(&parse_orbit("su3u1").map_err(err)?).map_err(err)?;
    let unitary = su3
        .families
        .iter()
        .find(|f| f.rep == RepType::Unitary)
        .ok_or("no unitary family")?;
    ensure(
        unitary.achieved_dim == 2,
        format!("su3u1 unitary span {}", unitary.achieved_dim),
    )?;
    let su2 = diagonalizability_verdict(&parse_orbit("su2").map_err(err)?).map_err(err)?;
    let t3 = diagonalizability_verdict(&parse_orbit("t3").map_err(err)?).map_err(err)?;
    ensure(
        su2.diagonalizable && !t3.diagonalizable,
        "trivial isotropy verdicts",
    )?;
    Ok(format!("su3u1 verdict: {}", su3.verdict))
}

fn torus_catalog() -> Outcome {
    let mut parts = Vec::new();
    for (name, k, tol) in [
        ("s4", 32, 1e-8),
        ("s2xs2", 32, 1e-8),
        ("cp2", 32, 1e-8),
        ("page", 64, 1e-6),
    ] {
        let tm = metric_catalog(name).map_err(err)?;
        let r = torus_einstein_residual(&tm, k, Scheme::Exact).map_err(err)?;
        ensure(r.max < tol, format!("{name}: residual {:e}", r.max))?;
        parts.push(format!("{name} {:.1e}", r.max));
    }
    let page = metric_catalog("page").map_err(err)?;
    parts.push(format!("page λ = {:.9}", page.lambda));

    let s4 = metric_catalog("s4").map_err(err)?;
    let fd = |k| {
        torus_einstein_residual(
            &s4,
            k,
            Scheme::FiniteDifference {
                relative_step: None,
            },
        )
        .map(|r| r.max)
        .map_err(err)
    };
    let (r8, r16, r32) = (fd(8)?, fd(16)?, fd(32)?);
    ensure(
        r8 / r16 >= 8.0 && r16 / r32 >= 8.0,
        format!("convergence {r8:e} {r16:e} {r32:e}"),
    )?;
    parts.push(format!("FD ratios {:.1}, {:.1}", r8 / r16, r16 / r32));

    let b = bolt_area_identity(&metric_catalog("s2xs2").map_err(err)?, 128).map_err(err)?;
    let target = 16.0 * PI * PI;
    ensure(
        (b.a_total - target).abs() / target < 1e-6
            && (b.b_total - target).abs() / target < 1e-6
            && b.relative_error < 1e-6,
        format!("bolt areas {b:?}"),
    )?;
    for (side, pair) in [(Side::ThetaMin, (1, 0)), (Side::ThetaMax, (0, 1))] {
        let g = surface_gravity(&s4, side, pair, 17).map_err(err)?;
        ensure(
            (g.mean - 1.0).abs() < 1e-6 && g.spread < 1e-6,
            format!("κ² on {side}: {}", g.mean),
        )?;
    }
    parts.push("bolt identity and κ² = 1 hold".into());
    Ok(parts.join("; "))
}

fn property_suites() -> Outcome {
    let mut r = rng(1010);
    for trial in 0..50 {
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
        let w = fiber(&t);
        let s = Poly::linear(rat(r.gen_range(-9..=9), 5), rat(r.gen_range(-9..=9), 2));
        let (e, f) = (rat(r.gen_range(-5..=5), 3), rat(r.gen_range(-5..=5), 7));
        let h = h_from_scalar(&w, &s, &e, &f);
        ensure(
            scalar_of_h(&w, &h) == RatFunc::from_poly(s),
            format!("round trip {trial}"),
        )?;
    }
    for _ in 0..50 {
        let den = r.gen_range(1..=6);
        let quad = ProfileEntry::shifted_quadratic(
            2,
            rat(r.gen_range(1..20), den),
            rat(r.gen_range(-20..20), den),
            rat(r.gen_range(-10..10), den),
        );
        let lin = ProfileEntry::linear(
            2,
            rat(r.gen_range(-20..20), den),
            rat(r.gen_range(1..20), den),
        );
        ensure(quad.mu().is_zero() && lin.mu().is_zero(), "μ ≠ 0")?;
    }
    for _ in 0..100 {
        let mut q = Poly::constant(int(if r.gen_bool(0.5) { 1 } else { -1 }));
        for _ in 0..r.gen_range(0..=4) {
            q = &q * &Poly::linear(int(r.gen_range(1..=4)), int(r.gen_range(-9..=9)));
        }
        let extra: Vec<Rational> = (0..r.gen_range(1..=4))
            .map(|_| rat(r.gen_range(-5..=5), r.gen_range(1..=3)))
            .collect();
        let extra = Poly::new(extra);
        if !extra.is_zero() {
            q = &q * &extra;
        }
        let cert = sturm_sign_certificate(&q, (&int(-2), &int(2)), (false, false)).map_err(err)?;
        let samples: Vec<f64> = (0..1000)
            .map(|i| q.eval_f64(-2.0 + 4.0 * i as f64 / 999.0))
            .collect();
        let scale = samples.iter().fold(0f64, |m, v| m.max(v.abs())).max(1.0);
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let agrees = match &cert {
            SignCertificate::Positive | SignCertificate::NonnegativeWithRoots { .. } => {
                min > -1e-9 * scale
            }
            SignCertificate::Fails { witness } => q.eval(witness) < int(0),
        };
        ensure(agrees, format!("Sturm disagrees with sampling on {q}"))?;
    }
    for seed in 0..50u64 {
        let mut g = rng(4000 + seed);
        let mut fan = vec![(1, 0), (0, 1), (-1, -1)];
        for _ in 0..g.gen_range(0..12) {
            let i = g.gen_range(0..fan.len());
            let (u, v): ((i64, i64), (i64, i64)) = (fan[i], fan[(i + 1) % fan.len()]);
            fan.insert(i + 1, (u.0 + v.0, u.1 + v.1));
        }
        let l = fan.len() as i64 - 3;
        let inv = orbit_invariants(&OrbitData::new(fan).map_err(err)?);
        ensure(
            inv.chi == 3 + l
                && inv.tau == 1 - l
                && inv.hitchin_thorpe_pass == blowup_corollary(1, l),
            format!("ℂP² # {l}ℂP̄²: {inv:?}"),
        )?;
    }
    Ok("50 round trips, 100 μ draws, 100 Sturm certificates, 50 orbit lists".into())
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "Abreu identity", abreu_identity),
        (2, "blowup extremal family", blowup_family),
        (3, "Page-conformal check", page_conformal),
        (4, "Sakane Kähler–Einstein", sakane),
        (5, "six-dimensional extremal family", six_dimensional),
        (6, "Hirzebruch Hermitian families", hermitian_families),
        (7, "Futaki invariants", futaki),
        (8, "diagonalizability", diagonalizability),
        (9, "T² catalog", torus_catalog),
        (10, "property suites", property_suites),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&id);
        let (tag, detail) = match (&outcome, known) {
            (Ok(d), false) => ("PASS", d),
            (Ok(d), true) => ("PASS (listed as known failure)", d),
            (Err(d), true) => ("FAIL (known)", d),
            (Err(d), false) => ("FAIL", d),
        };
        if outcome.is_err() != known {
            unexpected.push(id);
        }
        println!("criterion {id:>2} {tag}: {name} [{secs:.1}s] {detail}");
    }
    if !unexpected.is_empty() {
        println!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
