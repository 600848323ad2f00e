//! Delzant polytopes given by facet inequalities `<x, mu> >= lambda`.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::linalg::{determinant, kernel_vector, rank, solve, RatMatrix};
use crate::exactalg::rational::{int, rat_string, Rational};
use crate::exactalg::MPoly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub mu: Vec<i64>,
    #[serde(with = "rat_string")]
    pub lambda: Rational,
}

impl Facet {
    pub fn new(mu: Vec<i64>, lambda: Rational) -> Self {
        Facet { mu, lambda }
    }

    /// Affine function `l(x) = <x, mu> - lambda`.
    pub fn value(&self, x: &[Rational]) -> Rational {
        self.mu
            .iter()
            .zip(x)
            .fold(-self.lambda.clone(), |acc, (m, xi)| acc + xi * int(*m))
    }

    pub fn value_f64(&self, x: &[f64]) -> f64 {
        self.mu
            .iter()
            .zip(x)
            .map(|(m, xi)| *m as f64 * xi)
            .sum::<f64>()
            - crate::exactalg::to_f64(&self.lambda)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    n: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelzantFailure {
    WrongFacetCount,
    NonUnimodularCone,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelzantVerdict {
    pub is_delzant: bool,
    pub failures: Vec<(Vec<Rational>, DelzantFailure)>,
}

/// JSON form `{"n": 2, "facets": [{"mu": [1, 0], "lambda": "-1/1"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeSpec {
    pub n: usize,
    pub facets: Vec<Facet>,
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

impl Polytope {
    pub fn new(n: usize, facets: Vec<Facet>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadPolytope("dimension must be positive".into()));
        }
        for f in &facets {
            if f.mu.len() != n {
                return Err(Error::InvalidInput(format!(
                    "facet normal {:?} has wrong length",
                    f.mu
                )));
            }
            if gcd_all(&f.mu) != 1 {
                return Err(Error::InvalidInput(format!(
                    "facet normal {:?} is not primitive",
                    f.mu
                )));
            }
        }
        let vertices = enumerate_vertices(n, &facets);
        if vertices.is_empty() {
            return Err(Error::BadPolytope("no vertices".into()));
        }
        if has_recession_direction(n, &facets) {
            return Err(Error::BadPolytope("region is unbounded".into()));
        }
        let p = Polytope {
            n,
            facets,
            vertices,
        };
        if affine_dim(&p.vertices) != n {
            return Err(Error::BadPolytope("empty interior".into()));
        }
        Ok(p)
    }

    pub fn from_spec(spec: &PolytopeSpec) -> Result<Self> {
        Self::new(spec.n, spec.facets.clone())
    }

    pub fn to_spec(&self) -> PolytopeSpec {
        PolytopeSpec {
            n: self.n,
            facets: self.facets.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Lexicographically sorted, duplicate-free.
    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn active_facets(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&i| self.facets[i].value(x).is_zero())
            .collect()
    }

    pub fn is_interior(&self, x: &[Rational]) -> bool {
        self.facets.iter().all(|f| f.value(x).is_positive())
    }

    pub fn is_interior_f64(&self, x: &[f64]) -> bool {
        self.facets.iter().all(|f| f.value_f64(x) > 0.0)
    }

    pub fn centroid_of_vertices(&self) -> Vec<Rational> {
        let k = int(self.vertices.len() as i64);
        (0..self.n)
            .map(|i| {
                self.vertices
                    .iter()
                    .fold(Rational::zero(), |a, v| a + &v[i])
                    / &k
            })
            .collect()
    }

    /// Average of the vertices lying on facet `m`.
    pub fn facet_midpoint(&self, m: usize) -> Vec<Rational> {
        let on: Vec<&Vec<Rational>> = self
            .vertices
            .iter()
            .filter(|v| self.facets[m].value(v).is_zero())
            .collect();
        let k = int(on.len() as i64);
        (0..self.n)
            .map(|i| on.iter().fold(Rational::zero(), |a, v| a + &v[i]) / &k)
            .collect()
    }

    pub fn is_delzant(&self) -> DelzantVerdict {
        let mut failures = Vec::new();
        for v in &self.vertices {
            let act = self.active_facets(v);
            if act.len() != self.n {
                failures.push((v.clone(), DelzantFailure::WrongFacetCount));
                continue;
            }
            let m: RatMatrix = act
                .iter()
                .map(|&i| self.facets[i].mu.iter().map(|&x| int(x)).collect())
                .collect();
            if determinant(&m).abs() != Rational::one() {
                failures.push((v.clone(), DelzantFailure::NonUnimodularCone));
            }
        }
        DelzantVerdict {
            is_delzant: failures.is_empty(),
            failures,
        }
    }

    /// Exact `∫_P x^exponent dx`.
    pub fn moment_integral(&self, exponent: &[u32]) -> Rational {
        assert_eq!(exponent.len(), self.n);
        let mut integrand = MPoly::one(self.n);
        for (k, &e) in exponent.iter().enumerate() {
            integrand = &integrand * &MPoly::var(self.n, k).pow(e);
        }
        self.triangulate()
            .iter()
            .map(|s| simplex_integral(s, &integrand))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn volume(&self) -> Rational {
        self.moment_integral(&vec![0; self.n])
    }

    /// Unnormalized toric Futaki vector `(∫ x_i dx)_i`.
    pub fn futaki_toric(&self) -> Vec<Rational> {
        (0..self.n)
            .map(|i| {
                let mut e = vec![0; self.n];
                e[i] = 1;
                self.moment_integral(&e)
            })
            .collect()
    }

    /// Fan triangulation anchored at the lexicographically smallest vertex, recursively on faces.
    pub fn triangulate(&self) -> Vec<Vec<Vec<Rational>>> {
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut out = Vec::new();
        self.triangulate_face(&all, self.n, &mut out);
        out.into_iter()
            .map(|s| s.into_iter().map(|i| self.vertices[i].clone()).collect())
            .collect()
    }

    fn triangulate_face(&self, face: &[usize], dim: usize, out: &mut Vec<Vec<usize>>) {
        if dim == 0 {
            out.push(vec![face[0]]);
            return;
        }
        let apex = *face
            .iter()
            .min_by(|&&a, &&b| self.vertices[a].cmp(&self.vertices[b]))
            .expect("nonempty face");
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in &self.facets {
            let sub: Vec<usize> = face
                .iter()
                .copied()
                .filter(|&i| f.value(&self.vertices[i]).is_zero())
                .collect();
            if sub.contains(&apex) || sub.len() < dim {
                continue;
            }
            let pts: Vec<Vec<Rational>> = sub.iter().map(|&i| self.vertices[i].clone()).collect();
            if affine_dim(&pts) != dim - 1 || !seen.insert(sub.clone()) {
                continue;
            }
            let mut pieces = Vec::new();
            self.triangulate_face(&sub, dim - 1, &mut pieces);
            for mut s in pieces {
                s.insert(0, apex);
                out.push(s);
            }
        }
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Polytope) -> Result<Polytope> {
        let n = self.n + other.n;
        let mut facets = Vec::new();
        for f in &self.facets {
            let mut mu = f.mu.clone();
            mu.extend(std::iter::repeat_n(0, other.n));
            facets.push(Facet::new(mu, f.lambda.clone()));
        }
        for f in &other.facets {
            let mut mu = vec![0; self.n];
            mu.extend(f.mu.iter().copied());
            facets.push(Facet::new(mu, f.lambda.clone()));
        }
        Polytope::new(n, facets)
    }

    /// Translate by `v`: every facet keeps its normal.
    pub fn translate(&self, v: &[Rational]) -> Result<Polytope> {
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let shift =
                    f.mu.iter()
                        .zip(v)
                        .fold(Rational::zero(), |a, (m, vi)| a + vi * int(*m));
                Facet::new(f.mu.clone(), &f.lambda + shift)
            })
            .collect();
        Polytope::new(self.n, facets)
    }

    /// Image under `x -> g x` for an integral matrix `g` with det ±1.
    pub fn transform(&self, g: &[Vec<i64>]) -> Result<Polytope> {
        let gm: RatMatrix = g
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        let ginv = crate::exactalg::linalg::inverse(&gm)
            .ok_or_else(|| Error::InvalidInput("singular transform".into()))?;
        // <g^{-1} y, mu> = <y, g^{-T} mu>
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let mu: Vec<i64> = (0..self.n)
                    .map(|j| {
                        let s = (0..self.n)
                            .fold(Rational::zero(), |a, i| a + &ginv[i][j] * int(f.mu[i]));
                        assert!(s.is_integer(), "transform is not unimodular");
                        i64::try_from(s.to_integer()).expect("small entry")
                    })
                    .collect();
                Facet::new(mu, f.lambda.clone())
            })
            .collect();
        Polytope::new(self.n, facets)
    }
}

fn enumerate_vertices(n: usize, facets: &[Facet]) -> Vec<Vec<Rational>> {
    let mut out: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for combo in combinations(facets.len(), n) {
        let a: RatMatrix = combo
            .iter()
            .map(|&i| facets[i].mu.iter().map(|&x| int(x)).collect())
            .collect();
        let b: Vec<Rational> = combo.iter().map(|&i| facets[i].lambda.clone()).collect();
        if let Some(x) = solve(&a, &b) {
            if facets.iter().all(|f| !f.value(&x).is_negative()) {
                out.insert(x);
            }
        }
    }
    out.into_iter().collect()
}

fn has_recession_direction(n: usize, facets: &[Facet]) -> bool {
    for combo in combinations(facets.len(), n - 1) {
        let a: RatMatrix = combo
            .iter()
            .map(|&i| facets[i].mu.iter().map(|&x| int(x)).collect())
            .collect();
        if n > 1 && rank(&a) != n - 1 {
            continue;
        }
        let Some(d) = kernel_vector(&a, n) else {
            continue;
        };
        for sign in [1, -1] {
            let ok = facets.iter().all(|f| {
                let s =
                    f.mu.iter()
                        .zip(&d)
                        .fold(Rational::zero(), |acc, (m, di)| acc + di * int(*m));
                !(s * int(sign)).is_negative()
            });
            if ok {
                return true;
            }
        }
    }
    false
}

fn affine_dim(pts: &[Vec<Rational>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let diffs: RatMatrix = pts[1..]
        .iter()
        .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// `∫_S p` over a simplex via the Dirichlet formula on barycentric coordinates.
fn simplex_integral(s: &[Vec<Rational>], p: &MPoly) -> Rational {
    let n = s.len() - 1;
    let jac: RatMatrix = s[1..]
        .iter()
        .map(|v| v.iter().zip(&s[0]).map(|(a, b)| a - b).collect())
        .collect();
    let vol_factor = determinant(&jac).abs();
    if vol_factor.is_zero() {
        return Rational::zero();
    }
    // x_k = s0_k + Σ_i t_i (s_i - s0)_k
    let subs: Vec<MPoly> = (0..n)
        .map(|k| {
            let mut e = MPoly::constant(n, s[0][k].clone());
            for i in 0..n {
                e = &e + &MPoly::var(n, i).scale(&jac[i][k]);
            }
            e
        })
        .collect();
    let mut q = MPoly::zero(n);
    for (exp, c) in p.terms() {
        let mut t = MPoly::constant(n, c.clone());
        for (k, &d) in exp.iter().enumerate() {
            if d > 0 {
                t = &t * &subs[k].pow(d);
            }
        }
        q = &q + &t;
    }
    // ∫_{standard simplex} t^β = β! / (n + |β|)!
    let mut acc = Rational::zero();
    for (exp, c) in q.terms() {
        let num: Rational = exp
            .iter()
            .fold(Rational::one(), |a, &b| a * factorial(b as u64));
        let tot: u64 = exp.iter().map(|&b| b as u64).sum::<u64>() + n as u64;
        acc += c * num / factorial(tot);
    }
    acc * vol_factor
}

fn factorial(k: u64) -> Rational {
    (1..=k).fold(Rational::one(), |a, i| a * int(i as i64))
}

/// Named polytopes used throughout; `params` holds `a` (and `c`) where relevant.
pub fn catalog(name: &str, params: &[Rational]) -> Result<Polytope> {
    let one = || int(1);
    let m1 = || int(-1);
    let need = |k: usize| -> Result<()> {
        if params.len() < k {
            return Err(Error::InvalidInput(format!(
                "`{name}` needs {k} parameter(s)"
            )));
        }
        for p in &params[..k] {
            if !p.is_positive() {
                return Err(Error::OutOfRange(format!(
                    "`{name}` needs positive parameters"
                )));
            }
        }
        Ok(())
    };
    let f = |mu: &[i64], lam: Rational| Facet::new(mu.to_vec(), lam);
    match name {
        "cp1" => Polytope::new(1, vec![f(&[1], m1()), f(&[-1], m1())]),
        "cp2" => Polytope::new(
            2,
            vec![f(&[1, 0], m1()), f(&[0, 1], m1()), f(&[-1, -1], m1())],
        ),
        "cp1xcp1" => Polytope::new(
            2,
            vec![
                f(&[1, 0], m1()),
                f(&[-1, 0], m1()),
                f(&[0, 1], m1()),
                f(&[0, -1], m1()),
            ],
        ),
        "hexagon" => Polytope::new(
            2,
            vec![
                f(&[1, 0], m1()),
                f(&[-1, 0], m1()),
                f(&[0, 1], m1()),
                f(&[0, -1], m1()),
                f(&[1, 1], m1()),
                f(&[-1, -1], m1()),
            ],
        ),
        "blowup1" => {
            need(1)?;
            let a = params[0].clone();
            Polytope::new(
                2,
                vec![
                    f(&[1, 0], m1()),
                    f(&[-1, 0], m1()),
                    f(&[0, 1], m1()),
                    f(&[-1, -1], -a),
                ],
            )
        }
        "sakane6" => catalog("sixdim", &[one(), one()]),
        "sixdim" => {
            need(2)?;
            let (a, c) = (params[0].clone(), params[1].clone());
            Polytope::new(
                3,
                vec![
                    f(&[1, 0, 0], m1()),
                    f(&[-1, 0, 0], m1()),
                    f(&[0, 1, 0], m1()),
                    f(&[0, 0, 1], m1()),
                    f(&[-1, -1, 0], -a),
                    f(&[1, 0, -1], -c),
                ],
            )
        }
        "rect" => {
            need(2)?;
            Polytope::new(
                2,
                vec![
                    f(&[1, 0], -params[0].clone()),
                    f(&[-1, 0], -params[0].clone()),
                    f(&[0, 1], -params[1].clone()),
                    f(&[0, -1], -params[1].clone()),
                ],
            )
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

pub const CATALOG_NAMES: &[&str] = &[
    "cp1", "cp2", "cp1xcp1", "hexagon", "blowup1", "sakane6", "sixdim", "rect",
];
