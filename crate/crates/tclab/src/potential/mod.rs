//! Symplectic potentials `Φ = Φ_P + Ψ` on a polytope.
//!
//! `Φ_P = ½ Σ l_m log l_m` is the canonical part. The correction `Ψ` enters only through its
//! exact Hessian, so every second-and-higher derivative of `Φ` is a rational function and the
//! metric data `h⁻¹ = ∂²Φ`, `h` and `det h` are exact at rational points.

pub mod catalog;
pub mod jet;

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroUsize;
use std::sync::{Arc, OnceLock};

use gauss_quad::GaussLegendre;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::linalg::{is_positive_definite, RatMatrix};
use crate::exactalg::mpoly::default_names;
use crate::exactalg::rational::{format_rat, int, parse_rat, rat, to_f64};
use crate::exactalg::{parse_multi_ratfunc, MultiRatFunc, Rational};
use crate::polytope::{Facet, Polytope};

pub use catalog::{potential_catalog, POTENTIAL_NAMES};
pub use jet::{jet_det_inverse, Jet};

/// `(Ψ(x), ∇Ψ(x))` in floating point, up to an affine function of `x`.
pub type NumericClosure = Arc<dyn Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync>;

#[derive(Clone)]
pub struct Potential {
    polytope: Polytope,
    correction: Vec<Vec<MultiRatFunc>>,
    closure: Option<NumericClosure>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("polytope", &self.polytope)
            .field("correction", &self.correction)
            .field("closure", &self.closure.is_some())
            .finish()
    }
}

impl PartialEq for Potential {
    fn eq(&self, o: &Self) -> bool {
        self.polytope == o.polytope && self.correction == o.correction
    }
}

/// Generic interior sample points: blends of the vertex centroid with each vertex and facet midpoint.
fn sample_points(p: &Polytope) -> Vec<Vec<Rational>> {
    let c = p.centroid_of_vertices();
    let mut sites: Vec<Vec<Rational>> = p.vertices().to_vec();
    sites.extend((0..p.facets().len()).map(|m| p.facet_midpoint(m)));
    let mut out = vec![c.clone()];
    for s in &sites {
        for t in [rat(1, 7), rat(3, 7), rat(5, 7)] {
            out.push(
                s.iter()
                    .zip(&c)
                    .map(|(si, ci)| si * &t + ci * (int(1) - &t))
                    .collect(),
            );
        }
    }
    out
}

impl Potential {
    pub fn canonical(polytope: Polytope) -> Self {
        let n = polytope.dim();
        let correction = vec![vec![MultiRatFunc::zero(n); n]; n];
        Potential {
            polytope,
            correction,
            closure: None,
        }
    }

    /// `correction[k][l] = ∂²Ψ/∂x_k∂x_l`; must be symmetric and finite at interior sample points.
    pub fn new(polytope: Polytope, correction: Vec<Vec<MultiRatFunc>>) -> Result<Self> {
        let n = polytope.dim();
        if correction.len() != n || correction.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!(
                "correction Hessian must be {n}×{n}"
            )));
        }
        for (k, row) in correction.iter().enumerate() {
            for (l, e) in row.iter().enumerate() {
                if e.nvars() != n {
                    return Err(Error::InvalidInput(format!(
                        "entry ({k},{l}) is not in {n} variables"
                    )));
                }
                if correction[l][k] != *e {
                    return Err(Error::InvalidInput(format!(
                        "correction Hessian not symmetric at ({k},{l})"
                    )));
                }
            }
        }
        for x in sample_points(&polytope) {
            for row in &correction {
                for e in row {
                    if e.den().eval(&x).is_zero() {
                        return Err(Error::InvalidInput(format!(
                            "correction denominator vanishes at interior point ({})",
                            x.iter().map(format_rat).collect::<Vec<_>>().join(", ")
                        )));
                    }
                }
            }
        }
        Ok(Potential {
            polytope,
            correction,
            closure: None,
        })
    }

    /// Correction depending on `x_k` only, given by its second derivative.
    pub fn with_fxx(polytope: Polytope, k: usize, fxx: MultiRatFunc) -> Result<Self> {
        let n = polytope.dim();
        let mut c = vec![vec![MultiRatFunc::zero(n); n]; n];
        c[k][k] = fxx;
        Potential::new(polytope, c)
    }

    pub fn with_closure(mut self, closure: NumericClosure) -> Self {
        self.closure = Some(closure);
        self
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    pub fn correction(&self) -> &[Vec<MultiRatFunc>] {
        &self.correction
    }

    /// Potential on `P₁ × P₂` whose correction is block diagonal.
    pub fn product(&self, other: &Potential) -> Result<Potential> {
        let (n1, n2) = (self.dim(), other.dim());
        let n = n1 + n2;
        let p = self.polytope.product(&other.polytope)?;
        let mut c = vec![vec![MultiRatFunc::zero(n); n]; n];
        let first: Vec<usize> = (0..n1).collect();
        let second: Vec<usize> = (n1..n).collect();
        let lift = |e: &MultiRatFunc, map: &[usize]| {
            MultiRatFunc::new(e.num().embed(n, map), e.den().embed(n, map))
        };
        for k in 0..n1 {
            for l in 0..n1 {
                c[k][l] = lift(&self.correction[k][l], &first);
            }
        }
        for k in 0..n2 {
            for l in 0..n2 {
                c[n1 + k][n1 + l] = lift(&other.correction[k][l], &second);
            }
        }
        Potential::new(p, c)
    }

    fn check_interior(&self, x: &[Rational]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.dim()
            )));
        }
        if !self.polytope.is_interior(x) {
            return Err(Error::NotInterior(fmt_point(x)));
        }
        Ok(())
    }

    /// Taylor jets of `∂²Φ` at `x` to the given order.
    pub fn hessian_jets(&self, x: &[Rational], order: u32) -> Result<Vec<Vec<Jet>>> {
        self.check_interior(x)?;
        let n = self.dim();
        let mut h = canonical_hessian_jets(&self.polytope, x, order);
        if self.correction.iter().flatten().all(|e| e.is_zero()) {
            return Ok(h);
        }
        let vars: Vec<Jet> = (0..n)
            .map(|i| Jet::variable(n, order, i, x[i].clone()))
            .collect();
        for k in 0..n {
            for l in k..n {
                let e = &self.correction[k][l];
                if e.is_zero() {
                    continue;
                }
                let num = Jet::eval_mpoly(e.num(), &vars);
                let den = Jet::eval_mpoly(e.den(), &vars).recip().ok_or_else(|| {
                    Error::Singular(format!("correction pole at {}", fmt_point(x)))
                })?;
                let v = &num * &den;
                h[k][l] = &h[k][l] + &v;
                if l != k {
                    h[l][k] = &h[l][k] + &v;
                }
            }
        }
        Ok(h)
    }

    /// Exact `∂²Φ(x)`.
    pub fn hessian(&self, x: &[Rational]) -> Result<RatMatrix> {
        Ok(self
            .hessian_jets(x, 0)?
            .iter()
            .map(|r| r.iter().map(Jet::value).collect())
            .collect())
    }

    pub fn hessian_f64(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut h = vec![vec![0.0; n]; n];
        for f in self.polytope.facets() {
            let l = f.value_f64(x);
            for k in 0..n {
                for j in 0..n {
                    h[k][j] += 0.5 * (f.mu[k] * f.mu[j]) as f64 / l;
                }
            }
        }
        for k in 0..n {
            for j in 0..n {
                if !self.correction[k][j].is_zero() {
                    h[k][j] += self.correction[k][j].eval_f64(x);
                }
            }
        }
        h
    }

    /// `(Φ(x), ∇Φ(x))` in floating point; `Ψ` is fixed up to an affine function.
    pub fn value_and_gradient_f64(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let n = self.dim();
        let mut v = 0.0;
        let mut g = vec![0.0; n];
        for f in self.polytope.facets() {
            let l = f.value_f64(x);
            v += 0.5 * l * l.ln();
            for k in 0..n {
                g[k] += 0.5 * f.mu[k] as f64 * (l.ln() + 1.0);
            }
        }
        let (pv, pg) = match &self.closure {
            Some(c) => c(x),
            None => self.correction_by_quadrature(x),
        };
        v += pv;
        for k in 0..n {
            g[k] += pg[k];
        }
        (v, g)
    }

    /// `Ψ` normalized by `Ψ(c) = 0`, `∇Ψ(c) = 0` at the vertex centroid `c`, via Taylor's
    /// formula with integral remainder along the segment from `c`.
    fn correction_by_quadrature(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let n = self.dim();
        if self.correction.iter().flatten().all(|e| e.is_zero()) {
            return (0.0, vec![0.0; n]);
        }
        let c: Vec<f64> = self
            .polytope
            .centroid_of_vertices()
            .iter()
            .map(to_f64)
            .collect();
        let d: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
        let rule = gauss_rule();
        let panels = 8;
        let mut val = 0.0;
        let mut grad = vec![0.0; n];
        for p in 0..panels {
            let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
            for (s, w) in rule
                .iter()
                .map(|(t, w)| (a + (b - a) * (t + 1.0) / 2.0, w * (b - a) / 2.0))
            {
                let y: Vec<f64> = c.iter().zip(&d).map(|(ci, di)| ci + s * di).collect();
                let hd: Vec<f64> = (0..n)
                    .map(|k| {
                        (0..n)
                            .filter(|&l| !self.correction[k][l].is_zero())
                            .map(|l| self.correction[k][l].eval_f64(&y) * d[l])
                            .sum()
                    })
                    .collect();
                for k in 0..n {
                    grad[k] += w * hd[k];
                }
                val += w * (1.0 - s) * hd.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        (val, grad)
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Catalog { catalog, params } => {
                let params = params
                    .iter()
                    .map(|s| parse_rat(s))
                    .collect::<Result<Vec<_>>>()?;
                potential_catalog(catalog, &params)
            }
            PotentialSpec::Explicit {
                n,
                facets,
                correction_hessian,
            } => {
                let p = Polytope::new(*n, facets.clone())?;
                match correction_hessian {
                    None => Ok(Potential::canonical(p)),
                    Some(rows) => {
                        let parsed = rows
                            .iter()
                            .map(|r| {
                                r.iter()
                                    .map(|s| parse_multi_ratfunc(s, *n))
                                    .collect::<Result<Vec<_>>>()
                            })
                            .collect::<Result<Vec<_>>>()?;
                        Potential::new(p, parsed)
                    }
                }
            }
        }
    }

    pub fn to_spec(&self) -> PotentialSpec {
        let n = self.dim();
        let names = default_names(n);
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let trivial = self.correction.iter().flatten().all(|e| e.is_zero());
        PotentialSpec::Explicit {
            n,
            facets: self.polytope.facets().to_vec(),
            correction_hessian: (!trivial).then(|| {
                self.correction
                    .iter()
                    .map(|r| r.iter().map(|e| e.to_string_with(&names)).collect())
                    .collect()
            }),
        }
    }
}

fn gauss_rule() -> &'static Vec<(f64, f64)> {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let degree = NonZeroUsize::new(24).expect("nonzero");
        GaussLegendre::new(degree)
            .into_node_weight_pairs()
            .into_vec()
    })
}

/// Potential input. Either a catalog reference `{"catalog": "blowup1", "params": ["1"]}` or an
/// explicit polytope with an optional row-major correction Hessian in `x1..xn`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Catalog {
        catalog: String,
        #[serde(default)]
        params: Vec<String>,
    },
    Explicit {
        n: usize,
        facets: Vec<Facet>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        correction_hessian: Option<Vec<Vec<String>>>,
    },
}

fn fmt_point(x: &[Rational]) -> String {
    format!(
        "({})",
        x.iter().map(format_rat).collect::<Vec<_>>().join(", ")
    )
}

fn canonical_hessian_jets(p: &Polytope, x: &[Rational], order: u32) -> Vec<Vec<Jet>> {
    let n = p.dim();
    let mut h = vec![vec![Jet::zero(n, order); n]; n];
    let half = rat(1, 2);
    for f in p.facets() {
        // ∂_k∂_l (½ l log l) = ½ μ_k μ_l / l
        let inv = Jet::affine(order, &f.mu, f.value(x))
            .recip()
            .expect("interior point");
        let inv = inv.scale(&half);
        for k in 0..n {
            for l in 0..n {
                let m = f.mu[k] * f.mu[l];
                if m != 0 {
                    h[k][l] = &h[k][l] + &inv.scale(&int(m));
                }
            }
        }
    }
    h
}

/// Exact derivatives of the canonical potential at an interior point.
#[derive(Clone, Debug)]
pub struct CanonicalJets {
    /// `∂^α Φ_P(x)` for `2 ≤ |α| ≤ max_order`.
    pub derivatives: BTreeMap<Vec<u32>, Rational>,
    pub value: f64,
    pub gradient: Vec<f64>,
}

pub fn canonical_jets(p: &Polytope, x: &[Rational], max_order: u32) -> Result<CanonicalJets> {
    if !p.is_interior(x) {
        return Err(Error::NotInterior(fmt_point(x)));
    }
    let n = p.dim();
    let max_order = max_order.max(2);
    let h = canonical_hessian_jets(p, x, max_order - 2);
    let mut derivatives = BTreeMap::new();
    for alpha in multi_indices(n, max_order) {
        let total: u32 = alpha.iter().sum();
        if total < 2 {
            continue;
        }
        let mut beta = alpha.clone();
        let i = beta.iter().position(|&a| a > 0).expect("nonzero index");
        beta[i] -= 1;
        let j = beta.iter().position(|&a| a > 0).expect("nonzero index");
        beta[j] -= 1;
        derivatives.insert(alpha, h[i][j].partial(&beta));
    }
    let xf: Vec<f64> = x.iter().map(to_f64).collect();
    let canonical = Potential::canonical(p.clone());
    let (value, gradient) = canonical.value_and_gradient_f64(&xf);
    Ok(CanonicalJets {
        derivatives,
        value,
        gradient,
    })
}

/// All multi-indices in `n` variables of total degree at most `k`.
pub fn multi_indices(n: usize, k: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=k - used).map(move |a| {
                    let mut w = v.clone();
                    w.push(a);
                    w
                })
            })
            .collect();
    }
    out
}

/// Metric data at a point. Jets hold derivatives up to the requested order (2 by default).
#[derive(Clone, Debug)]
pub struct MetricPoint {
    pub point: Vec<Rational>,
    pub h_inv: RatMatrix,
    pub h: RatMatrix,
    pub det_h: Rational,
    pub h_inv_jets: Vec<Vec<Jet>>,
    pub h_jets: Vec<Vec<Jet>>,
    pub det_h_jet: Jet,
}

pub fn metric_at(pot: &Potential, x: &[Rational]) -> Result<MetricPoint> {
    metric_at_order(pot, x, 2)
}

pub fn metric_at_order(pot: &Potential, x: &[Rational], order: u32) -> Result<MetricPoint> {
    let h_inv_jets = pot.hessian_jets(x, order)?;
    let h_inv: RatMatrix = h_inv_jets
        .iter()
        .map(|r| r.iter().map(Jet::value).collect())
        .collect();
    if !is_positive_definite(&h_inv) {
        return Err(Error::NotMetricPoint(fmt_point(x)));
    }
    let (det_inv, h_jets) =
        jet_det_inverse(&h_inv_jets).ok_or_else(|| Error::NotMetricPoint(fmt_point(x)))?;
    let det_h_jet = det_inv
        .recip()
        .ok_or_else(|| Error::NotMetricPoint(fmt_point(x)))?;
    let h = h_jets
        .iter()
        .map(|r| r.iter().map(Jet::value).collect())
        .collect();
    Ok(MetricPoint {
        point: x.to_vec(),
        h_inv,
        h,
        det_h: det_h_jet.value(),
        h_inv_jets,
        h_jets,
        det_h_jet,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundarySite {
    FacetMidpoint { facet: usize },
    Vertex { vertex: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundarySample {
    pub site: BoundarySite,
    pub point: Vec<f64>,
    /// δ at offsets 1e-2, 1e-3, 1e-4; `None` where the Hessian is not positive definite.
    pub delta: Vec<Option<f64>>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryVerdict {
    pub pass: bool,
    pub samples: Vec<BoundarySample>,
}

/// Samples `δ = [det(h⁻¹)·Π l_m]⁻¹` on inward offsets from every facet midpoint and vertex.
/// Passes iff every sample is positive and the two finest samples per site agree to 10%.
pub fn boundary_determinant_check(pot: &Potential) -> BoundaryVerdict {
    let p = pot.polytope();
    let c = p.centroid_of_vertices();
    let mut sites: Vec<(BoundarySite, Vec<Rational>)> = (0..p.facets().len())
        .map(|m| {
            (
                BoundarySite::FacetMidpoint { facet: m },
                p.facet_midpoint(m),
            )
        })
        .collect();
    sites.extend(
        p.vertices()
            .iter()
            .enumerate()
            .map(|(i, v)| (BoundarySite::Vertex { vertex: i }, v.clone())),
    );
    let samples: Vec<BoundarySample> = sites
        .into_iter()
        .map(|(site, s)| {
            let delta: Vec<Option<f64>> = [rat(1, 100), rat(1, 1000), rat(1, 10000)]
                .iter()
                .map(|eps| {
                    let y: Vec<Rational> = s
                        .iter()
                        .zip(&c)
                        .map(|(si, ci)| si + (ci - si) * eps)
                        .collect();
                    delta_at(pot, &y)
                })
                .collect();
            let pass = delta.iter().all(|d| d.is_some_and(|v| v > 0.0)) && {
                let (a, b) = (delta[1].unwrap_or(0.0), delta[2].unwrap_or(0.0));
                (a - b).abs() < 0.1 * a.abs().max(b.abs())
            };
            BoundarySample {
                site,
                point: s.iter().map(to_f64).collect(),
                delta,
                pass,
            }
        })
        .collect();
    BoundaryVerdict {
        pass: samples.iter().all(|s| s.pass),
        samples,
    }
}

fn delta_at(pot: &Potential, y: &[Rational]) -> Option<f64> {
    let hinv = pot.hessian(y).ok()?;
    if !is_positive_definite(&hinv) {
        return None;
    }
    let prod = pot
        .polytope()
        .facets()
        .iter()
        .fold(Rational::one(), |acc, f| acc * f.value(y));
    let d = crate::exactalg::linalg::determinant(&hinv) * prod;
    if !d.is_positive() {
        return None;
    }
    Some(to_f64(&(Rational::one() / d)))
}

/// Solves `∇Φ(x) = u` for `x` by damped Newton iteration (the gradient of the Legendre dual).
pub fn legendre_inverse(pot: &Potential, u: &[f64]) -> Result<Vec<f64>> {
    let n = pot.dim();
    if u.len() != n {
        return Err(Error::InvalidInput(format!(
            "expected {n} dual coordinates"
        )));
    }
    let mut x: Vec<f64> = pot
        .polytope()
        .centroid_of_vertices()
        .iter()
        .map(to_f64)
        .collect();
    for _ in 0..200 {
        let (_, g) = pot.value_and_gradient_f64(&x);
        let r: Vec<f64> = g.iter().zip(u).map(|(a, b)| a - b).collect();
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-13 {
            return Ok(x);
        }
        let h = pot.hessian_f64(&x);
        let step =
            solve_f64(h, r).ok_or_else(|| Error::Singular("Hessian in Newton step".into()))?;
        let mut t = 1.0;
        loop {
            let y: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - t * s).collect();
            if pot.polytope().is_interior_f64(&y) {
                x = y;
                break;
            }
            t /= 2.0;
            if t < 1e-12 {
                return Err(Error::Singular("Newton step left the polytope".into()));
            }
        }
    }
    Err(Error::NotFound("Newton iteration did not converge".into()))
}

fn solve_f64(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(piv, col);
        b.swap(piv, col);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}
