mod common;

use common::{catalog_params, interior_points};
use tclab::exactalg::linalg::{determinant, identity, mat_mul};
use tclab::exactalg::{int, parse_multi_ratfunc, rat, MultiRatFunc, Rational};
use tclab::polytope::catalog;
use tclab::potential::{
    boundary_determinant_check, canonical_jets, legendre_inverse, metric_at, potential_catalog,
    Potential, PotentialSpec, POTENTIAL_NAMES,
};
use tclab::Error;

fn pt(v: &[Rational]) -> Vec<Rational> {
    v.to_vec()
}

#[test]
fn canonical_jet_examples() {
    let j = canonical_jets(&catalog("cp1", &[]).unwrap(), &[int(0)], 4).unwrap();
    assert_eq!(j.derivatives[&vec![2]], int(1));
    assert_eq!(j.derivatives[&vec![3]], int(0));
    // ∂⁴ = ½ Σ 2/l³ = 2 at the origin
    assert_eq!(j.derivatives[&vec![4]], int(2));
    assert!((j.value - 0.0).abs() < 1e-15);

    let j = canonical_jets(&catalog("cp2", &[]).unwrap(), &[int(0), int(0)], 2).unwrap();
    assert_eq!(j.derivatives[&vec![2, 0]], int(1));
    assert_eq!(j.derivatives[&vec![1, 1]], rat(1, 2));
    assert_eq!(j.derivatives[&vec![0, 2]], int(1));

    let j = canonical_jets(&catalog("cp1xcp1", &[]).unwrap(), &[int(0), int(0)], 3).unwrap();
    for (a, v) in &j.derivatives {
        if a.iter().sum::<u32>() == 3 {
            assert_eq!(*v, int(0), "{a:?}");
        }
    }
    assert!(matches!(
        canonical_jets(&catalog("cp1", &[]).unwrap(), &[int(1)], 2),
        Err(Error::NotInterior(_))
    ));
}

#[test]
fn metric_examples() {
    let cp1 = potential_catalog("cp1", &[]).unwrap();
    let m = metric_at(&cp1, &[int(0)]).unwrap();
    assert_eq!(m.h, vec![vec![int(1)]]);
    assert_eq!(m.det_h, int(1));
    // h = 1 − x² as a function
    let m = metric_at(&cp1, &[rat(1, 3)]).unwrap();
    assert_eq!(m.h[0][0], rat(8, 9));
    assert_eq!(m.h_jets[0][0].partial(&[1]), rat(-2, 3));
    assert_eq!(m.h_jets[0][0].partial(&[2]), int(-2));

    let cp2 = potential_catalog("cp2", &[]).unwrap();
    let m = metric_at(&cp2, &[int(0), int(0)]).unwrap();
    assert_eq!(
        m.h,
        vec![vec![rat(4, 3), rat(-2, 3)], vec![rat(-2, 3), rat(4, 3)]]
    );
    assert_eq!(m.det_h, rat(4, 3));

    let fxx = parse_multi_ratfunc("1/2*1/(x-2) + 1/(x^2-11*x+21)", 2).unwrap();
    let pot = Potential::with_fxx(catalog("blowup1", &[int(1)]).unwrap(), 0, fxx).unwrap();
    let m = metric_at(&pot, &[int(0), int(0)]).unwrap();
    assert!(m.det_h > int(0) && m.h[0][0] > int(0));
}

#[test]
fn indefinite_hessian_is_not_a_metric_point() {
    let fxx = parse_multi_ratfunc("-10", 1).unwrap();
    let pot = Potential::with_fxx(catalog("cp1", &[]).unwrap(), 0, fxx).unwrap();
    assert!(matches!(
        metric_at(&pot, &[int(0)]),
        Err(Error::NotMetricPoint(_))
    ));
}

#[test]
fn catalog_metrics_invert_exactly() {
    for (k, name) in POTENTIAL_NAMES.iter().enumerate() {
        let pot = potential_catalog(name, &catalog_params(name)).unwrap();
        for x in interior_points(pot.polytope(), 20, 100 + k as u64) {
            let m = metric_at(&pot, &x).unwrap();
            assert_eq!(mat_mul(&m.h, &m.h_inv), identity(pot.dim()), "{name}");
            assert_eq!(&m.det_h * determinant(&m.h_inv), int(1), "{name}");
        }
    }
}

#[test]
fn boundary_check_examples() {
    let v = boundary_determinant_check(&potential_catalog("cp1", &[]).unwrap());
    assert!(v.pass);
    for s in &v.samples {
        for d in &s.delta {
            assert!((d.unwrap() - 1.0).abs() < 1e-12);
        }
    }
    assert!(boundary_determinant_check(&potential_catalog("hexagon", &[]).unwrap()).pass);
    assert!(boundary_determinant_check(&potential_catalog("blowup1", &[int(1)]).unwrap()).pass);
    assert!(boundary_determinant_check(&potential_catalog("sakane6", &[]).unwrap()).pass);

    // triangle Hessian on the blowup polytope: the facet x = 1 has no log term
    let fxx = parse_multi_ratfunc("-1/2*1/(1-x)", 2).unwrap();
    let bad = Potential::with_fxx(catalog("blowup1", &[int(1)]).unwrap(), 0, fxx).unwrap();
    let v = boundary_determinant_check(&bad);
    assert!(!v.pass);
    let failing: Vec<_> = v.samples.iter().filter(|s| !s.pass).collect();
    assert!(!failing.is_empty());
    // every failing site lies on the facet x = 1
    assert!(failing.iter().all(|s| (s.point[0] - 1.0).abs() < 1e-12));
}

#[test]
fn legendre_inverse_matches_tanh() {
    let cp1 = potential_catalog("cp1", &[]).unwrap();
    for k in 0..10 {
        let u = -2.5 + 0.5 * k as f64;
        let x = legendre_inverse(&cp1, &[u]).unwrap();
        assert!((x[0] - u.tanh()).abs() < 1e-8, "u = {u}");
    }
}

#[test]
fn product_hessian_is_block_diagonal() {
    let sak = potential_catalog("sakane6", &[]).unwrap();
    let cp2 = potential_catalog("cp2", &[]).unwrap();
    let prod = cp2
        .product(&potential_catalog("cp1", &[]).unwrap())
        .unwrap();
    let big = sak.product(&cp2).unwrap();
    for x in interior_points(prod.polytope(), 5, 7) {
        let h = prod.hessian(&x).unwrap();
        assert_eq!(h[0][2], int(0));
        assert_eq!(h[1][2], int(0));
    }
    for x in interior_points(big.polytope(), 3, 8) {
        let h = big.hessian(&x).unwrap();
        for row in &h[..3] {
            assert!(row[3..5].iter().all(|v| *v == int(0)));
        }
    }
}

#[test]
fn sakane_catalog_matches_solver_correction() {
    let sak = potential_catalog("sakane6", &[]).unwrap();
    let via_solver = potential_catalog("sixdim", &[int(1), int(1)]).unwrap();
    assert_eq!(sak.correction(), via_solver.correction());
}

#[test]
fn blowup_catalog_matches_closed_form() {
    let pot = potential_catalog("blowup1", &[int(1)]).unwrap();
    let expect = parse_multi_ratfunc("1/2*1/(x-2) + 1/(x^2-11*x+21)", 2).unwrap();
    assert_eq!(pot.correction()[0][0], expect);
    assert!(pot.correction()[0][1].is_zero() && pot.correction()[1][1].is_zero());
}

#[test]
fn spec_round_trip() {
    let pot = potential_catalog("sakane6", &[]).unwrap();
    let json = serde_json::to_string(&pot.to_spec()).unwrap();
    let back: PotentialSpec = serde_json::from_str(&json).unwrap();
    assert_eq!(Potential::from_spec(&back).unwrap(), pot);

    let by_name: PotentialSpec =
        serde_json::from_str(r#"{"catalog": "blowup1", "params": ["1"]}"#).unwrap();
    assert_eq!(
        Potential::from_spec(&by_name).unwrap(),
        potential_catalog("blowup1", &[int(1)]).unwrap()
    );

    let asym = vec![
        vec![MultiRatFunc::zero(2), parse_multi_ratfunc("x", 2).unwrap()],
        vec![MultiRatFunc::zero(2), MultiRatFunc::zero(2)],
    ];
    assert!(matches!(
        Potential::new(catalog("cp2", &[]).unwrap(), asym),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn numeric_closure_matches_exact_hessian() {
    // second differences of the floating-point gradient reproduce the exact Hessian
    let pot = potential_catalog("blowup1", &[int(1)]).unwrap();
    let x = [0.2, -0.3];
    let h = pot.hessian(&pt(&[rat(1, 5), rat(-3, 10)])).unwrap();
    let eps = 1e-5;
    for k in 0..2 {
        let mut xp = x;
        let mut xm = x;
        xp[k] += eps;
        xm[k] -= eps;
        let (_, gp) = pot.value_and_gradient_f64(&xp);
        let (_, gm) = pot.value_and_gradient_f64(&xm);
        for l in 0..2 {
            let fd = (gp[l] - gm[l]) / (2.0 * eps);
            assert!((fd - tclab::exactalg::to_f64(&h[l][k])).abs() < 1e-6);
        }
    }
}
