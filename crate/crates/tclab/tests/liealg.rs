mod common;

use proptest::prelude::*;
use rand::Rng;
use tclab::exactalg::{int, rat, Rational};
use tclab::liealg::{
    bracket_project, diagonalizability_verdict, equivalence_vectors, parse_orbit,
    standard_decomposition, AlgElement, IsotropyDecomposition, RepType,
};
use tclab::Error;

fn basis(d: &IsotropyDecomposition) -> Vec<AlgElement> {
    d.k_basis
        .iter()
        .chain(d.summands.iter().flat_map(|s| &s.basis))
        .cloned()
        .collect()
}

fn combo(b: &[AlgElement], c: &[Rational]) -> AlgElement {
    b.iter()
        .zip(c)
        .fold(AlgElement::zero(b[0].dim()), |acc, (x, k)| {
            acc.add(&x.scale(k)).unwrap()
        })
}

fn catalog() -> Vec<IsotropyDecomposition> {
    ["stiefel:3", "stiefel:4", "flag:2,2", "su3u1", "su2", "t3"]
        .iter()
        .map(|s| parse_orbit(s).unwrap())
        .collect()
}

#[test]
fn bracket_examples() {
    let d = parse_orbit("stiefel:3").unwrap();
    let pb = bracket_project(&AlgElement::e(4, 1, 3), &AlgElement::e(4, 2, 3), &d).unwrap();
    assert_eq!(pb.bracket, AlgElement::e(4, 1, 2).scale(&int(-1)));
    assert_eq!(pb.projection, pb.bracket);
    assert_eq!(
        pb.coefficients,
        vec![vec![int(0), int(0)], vec![int(0), int(0)], vec![int(-1)]]
    );

    let x = AlgElement::e(4, 1, 3);
    assert!(x.bracket(&x).unwrap().is_zero());
    assert!(matches!(
        bracket_project(&AlgElement::e(3, 1, 2), &x, &d),
        Err(Error::InvalidInput(_))
    ));

    let su2 = parse_orbit("su2").unwrap();
    let b = basis(&su2);
    for k in 0..3 {
        assert_eq!(
            b[k].bracket(&b[(k + 1) % 3]).unwrap(),
            b[(k + 2) % 3],
            "k = {k}"
        );
    }
}

#[test]
fn decomposition_dims() {
    for (spec, dims) in [
        ("stiefel:3", vec![2, 2, 1]),
        ("stiefel:5", vec![4, 4, 1]),
        ("flag:2,2", vec![4, 2, 2, 2, 2, 1]),
        ("flag:2,3", vec![6, 2, 2, 3, 3, 1]),
        ("su3u1", vec![2, 2, 1, 1, 1]),
        ("su2", vec![1, 1, 1]),
    ] {
        let d = parse_orbit(spec).unwrap();
        assert_eq!(d.dims(), dims, "{spec}");
        d.validate().unwrap();
    }
    let su3 = parse_orbit("su3u1").unwrap();
    assert_eq!(su3.summands[0].rep, RepType::Unitary);
    assert_eq!(su3.summands[0].class, su3.summands[1].class);

    assert!(matches!(
        parse_orbit("grassmann:3"),
        Err(Error::UnknownName(_))
    ));
    assert!(matches!(
        standard_decomposition("stiefel", &[2]),
        Err(Error::OutOfRange(_))
    ));
    assert!(matches!(
        standard_decomposition("flag", &[1, 3]),
        Err(Error::OutOfRange(_))
    ));
    assert!(standard_decomposition("flag", &[2]).is_err());
    assert!(parse_orbit("stiefel:x").is_err());
}

#[test]
fn broken_decompositions_fail_validation() {
    let mut d = parse_orbit("stiefel:3").unwrap();
    d.summands[2].basis[0] = AlgElement::e(4, 1, 2).scale(&int(2));
    assert!(matches!(d.validate(), Err(Error::Inconsistent(_))));

    // moving a vector between summands breaks ad(k)-invariance
    let mut d = parse_orbit("stiefel:3").unwrap();
    let moved = d.summands[0].basis.pop().unwrap();
    d.summands[1].basis.push(moved);
    assert!(d.validate().is_err());
}

#[test]
fn stiefel_vectors() {
    for n in 3..=5 {
        let d = standard_decomposition("stiefel", &[n]).unwrap();
        let v = equivalence_vectors(&d, (0, 1)).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].label, "Z");
        assert_eq!(
            v[0].vector,
            AlgElement::e(n + 1, 1, 2).scale(&int(-(n as i64 - 1)))
        );
        let verdict = diagonalizability_verdict(&d).unwrap();
        assert!(verdict.diagonalizable);
        assert_eq!((verdict.required_dim, verdict.achieved_dim), (1, 1));
        assert_eq!(verdict.verdict, "diagonalizable");
    }
    let d = parse_orbit("stiefel:3").unwrap();
    assert!(matches!(
        equivalence_vectors(&d, (0, 2)),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        equivalence_vectors(&d, (0, 7)),
        Err(Error::OutOfRange(_))
    ));
}

#[test]
fn flag_vectors() {
    for (n1, n2) in [(2, 2), (2, 3), (3, 4)] {
        let d = standard_decomposition("flag", &[n1, n2]).unwrap();
        let size = n1 + n2 + 2;
        let e12 = AlgElement::e(size, 1, 2);
        assert_eq!(
            equivalence_vectors(&d, (1, 2)).unwrap()[0].vector,
            e12.scale(&int(-(n1 as i64)))
        );
        assert_eq!(
            equivalence_vectors(&d, (3, 4)).unwrap()[0].vector,
            e12.scale(&int(-(n2 as i64)))
        );
        let verdict = diagonalizability_verdict(&d).unwrap();
        assert!(!verdict.diagonalizable);
        assert_eq!((verdict.required_dim, verdict.achieved_dim), (2, 1));
        assert_eq!(verdict.verdict, "not diagonalizable by this method");
        assert_eq!(verdict.families.len(), 2);
    }
}

#[test]
fn su3u1_vectors() {
    let d = parse_orbit("su3u1").unwrap();
    let v = equivalence_vectors(&d, (0, 1)).unwrap();
    assert_eq!(
        v.iter().map(|x| x.label.as_str()).collect::<Vec<_>>(),
        ["Z", "W"]
    );
    assert_eq!(v[0].vector, AlgElement::e(3, 2, 3).scale(&int(-2)));
    assert_eq!(v[1].vector, AlgElement::ie(3, 2, 3).scale(&int(-2)));

    let verdict = diagonalizability_verdict(&d).unwrap();
    assert_eq!(verdict.verdict, "method inconclusive");
    assert!(!verdict.diagonalizable);
    // under either partial assumption the corresponding family alone is diagonalizable
    let unitary = verdict
        .families
        .iter()
        .find(|f| f.rep == RepType::Unitary)
        .unwrap();
    assert_eq!((unitary.required_dim, unitary.achieved_dim), (2, 2));
    let trivial = verdict
        .families
        .iter()
        .find(|f| f.rep == RepType::Orthogonal)
        .unwrap();
    assert_eq!(trivial.summands, vec![3, 4, 5]);
    assert_eq!((trivial.required_dim, trivial.achieved_dim), (3, 3));
}

#[test]
fn trivial_isotropy_verdicts() {
    let su2 = diagonalizability_verdict(&parse_orbit("su2").unwrap()).unwrap();
    assert!(su2.diagonalizable);
    assert_eq!((su2.required_dim, su2.achieved_dim), (3, 3));
    assert!(su2.rule_applied.contains("trivial isotropy"));

    let t3 = diagonalizability_verdict(&parse_orbit("t3").unwrap()).unwrap();
    assert!(!t3.diagonalizable);
    assert_eq!((t3.required_dim, t3.achieved_dim), (3, 0));
}

#[test]
fn jacobi_identity_on_basis_triples() {
    for d in catalog() {
        let b = basis(&d);
        // the Jacobiator is alternating, so unordered triples suffice
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate().skip(i + 1) {
                for z in &b[j + 1..] {
                    let t1 = x.bracket(&y.bracket(z).unwrap()).unwrap();
                    let t2 = y.bracket(&z.bracket(x).unwrap()).unwrap();
                    let t3 = z.bracket(&x.bracket(y).unwrap()).unwrap();
                    assert!(
                        t1.add(&t2).unwrap().add(&t3).unwrap().is_zero(),
                        "{}",
                        d.name
                    );
                }
            }
        }
    }
}

#[test]
fn q_is_ad_invariant_and_projection_is_orthogonal() {
    let mut rng = common::rng(21);
    for d in catalog() {
        let b = basis(&d);
        for _ in 0..10 {
            let mut draw = || {
                combo(
                    &b,
                    &(0..b.len())
                        .map(|_| rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)))
                        .collect::<Vec<_>>(),
                )
            };
            let (x, y, z) = (draw(), draw(), draw());
            let lhs = d.q(&x.bracket(&y).unwrap(), &z).unwrap()
                + d.q(&y, &x.bracket(&z).unwrap()).unwrap();
            assert_eq!(lhs, int(0), "{}", d.name);

            let rest = x.sub(&d.project(&x).unwrap()).unwrap();
            for s in &d.summands {
                for yv in &s.basis {
                    assert_eq!(d.q(&rest, yv).unwrap(), int(0));
                }
            }
        }
    }
}

#[test]
fn sparse_serialization() {
    let z = AlgElement::ie(3, 2, 3)
        .scale(&int(-2))
        .add(&AlgElement::e(3, 1, 2).scale(&rat(1, 2)))
        .unwrap();
    let json = serde_json::to_value(&z).unwrap();
    assert_eq!(json["n"], 3);
    let values: Vec<&str> = json["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["1/2", "-1/2", "-2i", "-2i"]);
    assert_eq!(z.to_string(), "(1,2)=1/2 (2,1)=-1/2 (2,3)=-2i (3,2)=-2i");
    let verdict = diagonalizability_verdict(&parse_orbit("flag:2,2").unwrap()).unwrap();
    let v = serde_json::to_value(&verdict).unwrap();
    assert_eq!(v["families"][0]["rep"], "orthogonal");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn brackets_stay_in_the_algebra(c in prop::collection::vec(-6i64..6, 30), n in 3usize..5) {
        let d = standard_decomposition("stiefel", &[n]).unwrap();
        let b = basis(&d);
        let m = b.len();
        let x = combo(&b, &c[..m].iter().map(|v| int(*v)).collect::<Vec<_>>());
        let y = combo(&b, &c[c.len() - m..].iter().map(|v| int(*v)).collect::<Vec<_>>());
        let z = x.bracket(&y).unwrap();
        prop_assert!(z.is_skew_hermitian());
        let k_part = z.sub(&d.project(&z).unwrap()).unwrap();
        // the 𝔨-part is spanned by the 𝔨 basis
        let back = d.k_basis.iter().fold(AlgElement::zero(n + 1), |acc, k| {
            acc.add(&k.scale(&(d.q(&k_part, k).unwrap() / d.q(k, k).unwrap()))).unwrap()
        });
        prop_assert_eq!(back, k_part);
    }
}
