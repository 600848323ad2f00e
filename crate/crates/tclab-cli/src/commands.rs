use serde_json::{json, Value};

use tclab::cohom1::{einstein_h, futaki_fiberwise, scalar_of_h, solve_compact_extremal, FiberData};
use tclab::curvature::{
    abreu_scalar, abreu_scalar_simplified, adjugate_divergence, einstein_residual, extremal_fit,
};
use tclab::exactalg::linalg::solve;
use tclab::exactalg::{
    format_rat, int, parse_rat, sturm_sign_certificate, to_f64, Poly, RatFunc, Rational,
    SignCertificate,
};
use tclab::hermitian::{
    general_h_integration, hermitian_scalar, hirzebruch_hermitian_family, FiberProfile,
    ScalarSource,
};
use tclab::liealg::{diagonalizability_verdict, parse_orbit};
use tclab::polytope::{catalog, Polytope, PolytopeSpec};
use tclab::potential::{potential_catalog, Potential, PotentialSpec};
use tclab::torus4d::{
    bolt_area_identity, bolt_sides, isothermal_catalog, metric_catalog, orbit_invariants,
    rhoq_holomorphicity, surface_gravity, torus_einstein_residual, OrbitData, Scheme,
};

use crate::export::{grid, write_samples};
use crate::report::{Failure, Inputs, Outcome};
use crate::{
    Cli, Command, CurvatureArgs, DiagArgs, ExtremalArgs, FutakiArgs, HermitianArgs,
    PotentialSource, SchemeArg, T2Args, T2Check,
};

type Res<T> = Result<T, Failure>;

pub fn dispatch(cli: &Cli, inputs: &mut Inputs) -> Res<Outcome> {
    match &cli.command {
        Command::Curvature(a) => curvature(a, inputs),
        Command::Extremal(a) => extremal(a, cli),
        Command::Hermitian(a) => hermitian(a, cli),
        Command::Futaki(a) => futaki(a, inputs),
        Command::Diag(a) => diag(a),
        Command::T2(a) => t2(a),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn rats(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn parse_list(s: &str) -> Res<Vec<Rational>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_rat(t).map_err(Failure::from))
        .collect()
}

fn parse_interval(s: &str) -> Res<(Rational, Rational)> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((a.clone(), b.clone())),
        _ => Err(Failure::Input(format!(
            "interval must be `x0,x1`, got `{s}`"
        ))),
    }
}

fn json_input<T: serde::de::DeserializeOwned>(inputs: &mut Inputs, path: &str) -> Res<T> {
    let text = inputs.read(path)?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn load_potential(src: &PotentialSource, inputs: &mut Inputs) -> Res<Potential> {
    match (&src.potential, &src.catalog) {
        (Some(path), _) => Ok(Potential::from_spec(&json_input::<PotentialSpec>(
            inputs, path,
        )?)?),
        (None, Some(name)) => Ok(potential_catalog(name, &parse_list(&src.params)?)?),
        (None, None) => Err(Failure::Input(
            "give --potential FILE or --catalog NAME".into(),
        )),
    }
}

/// Points `lo + (hi − lo)(i + 1)/(k + 1)` of the vertex bounding box that are strictly interior.
fn interior_lattice(p: &Polytope, k: usize) -> Vec<Vec<Rational>> {
    let n = p.dim();
    let (mut lo, mut hi) = (p.vertices()[0].clone(), p.vertices()[0].clone());
    for v in p.vertices() {
        for i in 0..n {
            if v[i] < lo[i] {
                lo[i] = v[i].clone();
            }
            if v[i] > hi[i] {
                hi[i] = v[i].clone();
            }
        }
    }
    let denom = int(k as i64 + 1);
    let mut pts = vec![vec![]];
    for i in 0..n {
        let mut next = Vec::new();
        for p in &pts {
            for j in 1..=k {
                let mut q: Vec<Rational> = p.clone();
                q.push(&lo[i] + (&hi[i] - &lo[i]) * int(j as i64) / &denom);
                next.push(q);
            }
        }
        pts = next;
    }
    pts.into_iter().filter(|x| p.is_interior(x)).collect()
}

fn curvature(a: &CurvatureArgs, inputs: &mut Inputs) -> Res<Outcome> {
    if a.grid == 0 {
        return Err(Failure::Input("--grid must be positive".into()));
    }
    let pot = load_potential(&a.source, inputs)?;
    let lambda = a.einstein.as_deref().map(parse_rat).transpose()?;
    let pts = interior_lattice(pot.polytope(), a.grid);
    let (mut abreu_ok, mut adj_ok, mut einstein_ok) = (true, true, true);
    let mut rows = Vec::new();
    for x in &pts {
        let s = abreu_scalar(&pot, x)?;
        let t = abreu_scalar_simplified(&pot, x)?;
        let div = adjugate_divergence(&pot, x)?;
        abreu_ok &= s == t;
        adj_ok &= div.iter().all(|v| *v == int(0));
        let residuals = match &lambda {
            Some(l) => {
                let r = einstein_residual(&pot, l, x)?;
                einstein_ok &= r.iter().flatten().all(|v| *v == int(0));
                Some(r.iter().map(|row| rats(row)).collect::<Vec<_>>())
            }
            None => None,
        };
        rows.push(json!({
            "point": rats(x),
            "S": format_rat(&s),
            "S_simplified": format_rat(&t),
            "adjugate_div": rats(&div),
            "residuals": residuals,
        }));
    }
    let fit = if pts.len() > pot.dim() {
        Some(to_value(&extremal_fit(&pot, &pts)?))
    } else {
        None
    };
    Ok(Outcome {
        passed: abreu_ok && adj_ok && einstein_ok,
        results: json!({ "dimension": pot.dim(), "points": rows, "extremal_fit": fit }),
        certificates: json!({
            "abreu_identity": abreu_ok,
            "adjugate_identity": adj_ok,
            "einstein": lambda.as_ref().map(|_| einstein_ok),
        }),
    })
}

/// Sign of `h = P/Q` through `P·Q` on the open interval.
fn profile_positivity(h: &RatFunc, x0: &Rational, x1: &Rational) -> Res<SignCertificate> {
    Ok(sturm_sign_certificate(
        &(h.num() * h.den()),
        (x0, x1),
        (true, true),
    )?)
}

fn export_rows(
    cli: &Cli,
    x0: &Rational,
    x1: &Rational,
    h: &RatFunc,
    s: &RatFunc,
    fibers: &[Poly],
) -> Res<()> {
    let Some(path) = &cli.csv else { return Ok(()) };
    let mut header = vec!["x".to_string(), "h".into(), "S".into()];
    header.extend((1..=fibers.len()).map(|j| format!("A_{j}")));
    let rows: Vec<Vec<f64>> = grid(to_f64(x0), to_f64(x1), cli.samples)
        .into_iter()
        .map(|x| {
            let mut r = vec![x, h.eval_f64(x), s.eval_f64(x)];
            r.extend(fibers.iter().map(|a| a.eval_f64(x)));
            r
        })
        .collect();
    write_samples(path, &header, &rows)
}

fn extremal(a: &ExtremalArgs, cli: &Cli) -> Res<Outcome> {
    let w: FiberData = a.fiber.parse()?;
    let (x0, x1) = parse_interval(&a.interval)?;
    let fibers: Vec<Poly> = w.entries().iter().map(|e| e.poly()).collect();
    if let Some(l) = &a.einstein {
        let lambda = parse_rat(l)?;
        let sol = einstein_h(&w, &lambda, (&x0, &x1))?;
        let positivity = profile_positivity(&sol.h, &x0, &x1)?;
        let s = scalar_of_h(&w, &sol.h);
        export_rows(cli, &x0, &x1, &sol.h, &s, &fibers)?;
        return Ok(Outcome {
            passed: sol.smooth_left && sol.smooth_right && positivity.is_positive(),
            results: json!({ "fiber": w.to_string(), "einstein": to_value(&sol) }),
            certificates: json!({
                "positivity": to_value(&positivity),
                "smooth_left": sol.smooth_left,
                "smooth_right": sol.smooth_right,
            }),
        });
    }
    let sol = solve_compact_extremal(&w, (&x0, &x1))?;
    let csc = sol.alpha == int(0);
    export_rows(
        cli,
        &x0,
        &x1,
        &sol.h,
        &RatFunc::from_poly(sol.scalar()),
        &fibers,
    )?;
    let passed =
        sol.smooth_left && sol.smooth_right && sol.positivity.is_nonnegative() && (!a.csc || csc);
    Ok(Outcome {
        passed,
        results: json!({ "fiber": w.to_string(), "solution": to_value(&sol) }),
        certificates: json!({
            "positivity": to_value(&sol.positivity),
            "smooth_left": sol.smooth_left,
            "smooth_right": sol.smooth_right,
            "constant_scalar": csc,
        }),
    })
}

/// Finds `S`, `h'(0)`, `h(0)` with `h(x0) = h(x1) = 0` and `h'(x0) = 2`, then checks `h'(x1) = −2`.
fn hermitian_profile(p: &FiberProfile, x0: &Rational, x1: &Rational) -> Res<(Rational, RatFunc)> {
    let q = p.v_half();
    let (q0, q1) = (q.eval(x0), q.eval(x1));
    if q0 == int(0) || q1 == int(0) {
        return Err(Failure::Input(
            "fibers must not collapse at the interval ends".into(),
        ));
    }
    let zero = int(0);
    let base = p.sum_d_q_over_a().double_antiderivative(&zero, &zero);
    let u = q.double_antiderivative(&zero, &zero);
    // P = base − S·u + e·x + f
    let m = vec![
        vec![-u.eval(x0), x0.clone(), int(1)],
        vec![-u.eval(x1), x1.clone(), int(1)],
        vec![-u.derivative().eval(x0), int(1), int(0)],
    ];
    let rhs = vec![
        -base.eval(x0),
        -base.eval(x1),
        int(2) * &q0 - base.derivative().eval(x0),
    ];
    let sol =
        solve(&m, &rhs).ok_or_else(|| Failure::Check("boundary conditions are singular".into()))?;
    let h = general_h_integration(p, ScalarSource::Profile, &sol[0], &sol[1], &sol[2])?;
    Ok((sol[0].clone(), h))
}

fn hermitian(a: &HermitianArgs, cli: &Cli) -> Res<Outcome> {
    if let Some(f) = &a.family {
        let v = parse_list(f)?;
        let (q, l) = match v.as_slice() {
            [q, l] if q.is_integer() => (q.to_integer(), l.clone()),
            _ => {
                return Err(Failure::Input(format!(
                    "family must be `q,l` with integer q, got `{f}`"
                )))
            }
        };
        let q: i64 = q
            .try_into()
            .map_err(|_| Failure::Input("q out of range".into()))?;
        let m = hirzebruch_hermitian_family(q, &l);
        let scalar_ok = if m.valid {
            let p = FiberProfile::new(vec![tclab::hermitian::ProfileEntry {
                d: 2,
                a: m.a1.clone(),
                b: m.b.clone(),
            }])?;
            export_rows(
                cli,
                &int(-1),
                &int(1),
                &m.h,
                &hermitian_scalar(&p, &m.h),
                std::slice::from_ref(&m.a1),
            )?;
            Some(hermitian_scalar(&p, &m.h) == RatFunc::constant(m.scalar.clone()))
        } else {
            None
        };
        return Ok(Outcome {
            passed: m.valid && scalar_ok == Some(true),
            results: json!({ "family": to_value(&m) }),
            certificates: json!({ "valid": m.valid, "violated": m.violated, "constant_scalar": scalar_ok }),
        });
    }
    let p: FiberProfile = a.profile.as_deref().unwrap_or_default().parse()?;
    let (x0, x1) = parse_interval(&a.interval)?;
    if x0 >= x1 {
        return Err(tclab::Error::EmptyInterval(format_rat(&x0), format_rat(&x1)).into());
    }
    let (s, h) = hermitian_profile(&p, &x0, &x1)?;
    let slope = h
        .derivative()
        .eval(&x1)
        .ok_or_else(|| Failure::Check("h' has a pole at the right end".into()))?;
    let positivity = profile_positivity(&h, &x0, &x1)?;
    let scalar = hermitian_scalar(&p, &h);
    let constant = scalar == RatFunc::constant(s.clone());
    let fibers: Vec<Poly> = p.entries().iter().map(|e| e.a.clone()).collect();
    export_rows(cli, &x0, &x1, &h, &scalar, &fibers)?;
    let smooth_right = slope == int(-2);
    Ok(Outcome {
        passed: smooth_right && constant && positivity.is_positive(),
        results: json!({
            "profile": p.to_string(),
            "interval": rats(&[x0, x1]),
            "S": format_rat(&s),
            "h": to_value(&h),
        }),
        certificates: json!({
            "positivity": to_value(&positivity),
            "right_slope": format_rat(&slope),
            "smooth_right": smooth_right,
            "constant_scalar": constant,
        }),
    })
}

fn futaki(a: &FutakiArgs, inputs: &mut Inputs) -> Res<Outcome> {
    let (source, value) = if let Some(f) = &a.fiber {
        let w: FiberData = f.parse()?;
        let (x0, x1) = parse_interval(&a.interval)?;
        let v = futaki_fiberwise(&w, (&x0, &x1));
        (w.to_string(), vec![v])
    } else {
        let p = match (&a.polytope, &a.polytope_file) {
            (Some(name), _) => catalog(name, &parse_list(&a.params)?)?,
            (None, Some(path)) => Polytope::from_spec(&json_input::<PolytopeSpec>(inputs, path)?)?,
            (None, None) => {
                return Err(Failure::Input(
                    "give --polytope, --polytope-file or --fiber".into(),
                ))
            }
        };
        let name = a.polytope.clone().unwrap_or_else(|| "file".into());
        (name, p.futaki_toric())
    };
    let vanishes = value.iter().all(|v| *v == int(0));
    Ok(Outcome {
        passed: true,
        results: json!({ "source": source, "futaki": rats(&value) }),
        certificates: json!({ "vanishes": vanishes }),
    })
}

fn diag(a: &DiagArgs) -> Res<Outcome> {
    let d = parse_orbit(&a.orbit)?;
    let v = diagonalizability_verdict(&d)?;
    Ok(Outcome {
        passed: true,
        certificates: json!({ "diagonalizable": v.diagonalizable, "verdict": v.verdict }),
        results: to_value(&v),
    })
}

fn t2(a: &T2Args) -> Res<Outcome> {
    if let Some(o) = &a.orbit {
        let d: OrbitData = o.parse()?;
        let inv = orbit_invariants(&d);
        let normalized: Vec<(i64, i64)> = d.normalized();
        return Ok(Outcome {
            passed: true,
            results: json!({
                "orbit": d.to_string(),
                "normalized": normalized,
                "invariants": to_value(&inv),
            }),
            certificates: json!({ "hitchin_thorpe_pass": inv.hitchin_thorpe_pass, "spin": inv.spin }),
        });
    }
    let name = a.example.as_deref().unwrap_or_default();
    let tol = a.tol.unwrap_or(match (a.check, name) {
        (T2Check::Einstein, "page") | (T2Check::Rhoq | T2Check::Bolts | T2Check::Gravity, _) => {
            1e-6
        }
        _ => 1e-8,
    });
    match a.check {
        T2Check::Einstein => {
            let tm = metric_catalog(name)?;
            let scheme = match a.scheme {
                SchemeArg::Exact => Scheme::Exact,
                SchemeArg::Fd => Scheme::FiniteDifference {
                    relative_step: None,
                },
            };
            let r = torus_einstein_residual(&tm, a.grid, scheme)?;
            Ok(Outcome {
                passed: r.max < tol,
                certificates: json!({ "max_residual": r.max, "tolerance": tol }),
                results: to_value(&r),
            })
        }
        T2Check::Rhoq => {
            let iso = isothermal_catalog(name)?;
            let r = rhoq_holomorphicity(&iso, a.grid)?;
            Ok(Outcome {
                passed: r.residual < tol,
                certificates: json!({ "residual": r.residual, "tolerance": tol }),
                results: to_value(&r),
            })
        }
        T2Check::Bolts => {
            let tm = metric_catalog(name)?;
            let b = bolt_area_identity(&tm, a.grid)?;
            Ok(Outcome {
                passed: b.relative_error < tol,
                certificates: json!({ "relative_error": b.relative_error, "tolerance": tol }),
                results: to_value(&b),
            })
        }
        T2Check::Gravity => {
            let tm = metric_catalog(name)?;
            let mut reports = Vec::new();
            let mut worst = 0.0f64;
            for (side, pair) in bolt_sides(&tm) {
                let g = surface_gravity(&tm, side, pair, a.grid)?;
                worst = worst.max(g.spread);
                reports.push(to_value(&g));
            }
            Ok(Outcome {
                passed: worst < tol,
                certificates: json!({ "max_spread": worst, "tolerance": tol }),
                results: json!({ "metric": name, "bolts": reports }),
            })
        }
    }
}
