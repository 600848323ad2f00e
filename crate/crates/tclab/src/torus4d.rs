//! Four-manifolds with an effective T² action.
//!
//! A T²-invariant metric is written `g = ǧ + h` with `ǧ = A dR² + B dθ²` on the orbit
//! space and `h` the 2×2 Gram matrix of the Killing fields `∂_φ, ∂_ψ`. Metric pieces are
//! closures over hyper-dual numbers so first and second derivatives are exact; the
//! finite-difference scheme is kept as an independent check.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_dual::{DualNum, HyperDual64};
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Second-order jet used to evaluate metric closures.
pub type Jet = HyperDual64;
/// Scalar function of `(R, θ)`.
pub type ScalarField = Arc<dyn Fn(Jet, Jet) -> Jet + Send + Sync>;
/// Fiber matrix as `[h11, h12, h22]`.
pub type FiberField = Arc<dyn Fn(Jet, Jet) -> [Jet; 3] + Send + Sync>;

pub const TORUS_CATALOG: [&str; 4] = ["s4", "cp2", "s2xs2", "page"];
pub const ISOTHERMAL_CATALOG: [&str; 2] = ["s4", "s2xs2"];

// ---------------------------------------------------------------------------
// Orbit data

/// Cyclic list of isotropy weights `(m_i, n_i)` labelling the edges of the orbit space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct OrbitData {
    pairs: Vec<(i64, i64)>,
}

fn det2(u: (i64, i64), v: (i64, i64)) -> i64 {
    u.0 * v.1 - u.1 * v.0
}

impl OrbitData {
    pub fn new(pairs: Vec<(i64, i64)>) -> Result<Self> {
        let k = pairs.len();
        if k < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least two pairs, got {k}"
            )));
        }
        for &(m, n) in &pairs {
            if m.gcd(&n) != 1 {
                return Err(Error::InvalidInput(format!("({m},{n}) is not coprime")));
            }
        }
        for i in 0..k {
            let (u, v) = (pairs[i], pairs[(i + 1) % k]);
            if det2(u, v).abs() != 1 {
                return Err(Error::InvalidInput(format!(
                    "adjacent pairs ({},{}) and ({},{}) have determinant {}",
                    u.0,
                    u.1,
                    v.0,
                    v.1,
                    det2(u, v)
                )));
            }
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    /// Representatives with `m ≥ 0`, and `n > 0` whenever `m = 0`.
    pub fn normalized(&self) -> Vec<(i64, i64)> {
        self.pairs
            .iter()
            .map(|&(m, n)| {
                if m < 0 || (m == 0 && n < 0) {
                    (-m, -n)
                } else {
                    (m, n)
                }
            })
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut pairs = self.pairs.clone();
        pairs.reverse();
        Self { pairs }
    }
}

impl TryFrom<Vec<(i64, i64)>> for OrbitData {
    type Error = Error;
    fn try_from(v: Vec<(i64, i64)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<OrbitData> for Vec<(i64, i64)> {
    fn from(d: OrbitData) -> Self {
        d.pairs
    }
}

impl fmt::Display for OrbitData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|(m, n)| format!("({m},{n})"))
            .collect();
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for OrbitData {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut offset = 0;
        for part in s.split(';') {
            let bad = |msg: &str| Error::Parse {
                pos: offset,
                msg: msg.to_string(),
            };
            let t = part.trim();
            let inner = t
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| bad("expected (m,n)"))?;
            let (m, n) = inner
                .split_once(',')
                .ok_or_else(|| bad("expected a comma"))?;
            let m = m.trim().parse().map_err(|_| bad("bad integer"))?;
            let n = n.trim().parse().map_err(|_| bad("bad integer"))?;
            pairs.push((m, n));
            offset += part.len() + 1;
        }
        Self::new(pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitInvariants {
    pub chi: i64,
    pub tau: i64,
    pub spin: bool,
    pub hitchin_thorpe_pass: bool,
}

/// Euler characteristic, signature and spin parity of the T²-manifold with orbit data `d`.
pub fn orbit_invariants(d: &OrbitData) -> OrbitInvariants {
    let p = d.normalized();
    let k = p.len();
    let tau: i64 = (0..k).map(|j| -det2(p[j], p[(j + 1) % k])).sum();
    let spin = (0..k).all(|j| det2(p[j], p[(j + 2) % k]) % 2 == 0);
    let chi = k as i64;
    OrbitInvariants {
        chi,
        tau,
        spin,
        hitchin_thorpe_pass: hitchin_thorpe(chi, tau),
    }
}

/// Strict Hitchin–Thorpe bound `2χ > 3|τ|`.
pub fn hitchin_thorpe(chi: i64, tau: i64) -> bool {
    2 * chi > 3 * tau.abs()
}

/// Bound for `k ℂP² # l ℂP̄²`: `4 + 5k > l > (k − 4)/5`.
pub fn blowup_corollary(k: i64, l: i64) -> bool {
    4 + 5 * k > l && 5 * l > k - 4
}

// ---------------------------------------------------------------------------
// Metrics and jets

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub r: (f64, f64),
    pub theta: (f64, f64),
}

impl Domain {
    fn point(&self, i: usize, j: usize, k: usize) -> (f64, f64) {
        let (r0, r1) = self.r;
        let (t0, t1) = self.theta;
        (
            r0 + (i as f64 + 0.5) * (r1 - r0) / k as f64,
            t0 + (j as f64 + 0.5) * (t1 - t0) / k as f64,
        )
    }

    fn widths(&self) -> (f64, f64) {
        (self.r.1 - self.r.0, self.theta.1 - self.theta.0)
    }

    pub fn centre(&self) -> (f64, f64) {
        self.point(0, 0, 1)
    }
}

/// `ǧ + h` in `(R, θ)` coordinates with its expected Einstein constant.
#[derive(Clone)]
pub struct TorusMetric {
    pub name: String,
    pub a: ScalarField,
    pub b: ScalarField,
    pub h: FiberField,
    pub domain: Domain,
    pub lambda: f64,
}

impl fmt::Debug for TorusMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusMetric")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

/// Value, gradient and Hessian at a point.
#[derive(Clone, Copy, Debug, Default)]
struct Taylor {
    v: f64,
    d: [f64; 2],
    dd: [[f64; 2]; 2],
}

impl Taylor {
    fn combine(parts: &[(f64, &Taylor)]) -> Taylor {
        let mut t = Taylor::default();
        for (c, p) in parts {
            t.v += c * p.v;
            for a in 0..2 {
                t.d[a] += c * p.d[a];
                for b in 0..2 {
                    t.dd[a][b] += c * p.dd[a][b];
                }
            }
        }
        t
    }
}

fn jet(x: f64) -> Jet {
    Jet::from(x)
}

/// Exact jets of `N` functions evaluated together.
fn exact_jets<const N: usize>(f: impl Fn(Jet, Jet) -> [Jet; N], x: f64, y: f64) -> [Taylor; N] {
    let xx = f(jet(x).derivative1().derivative2(), jet(y));
    let yy = f(jet(x), jet(y).derivative1().derivative2());
    let xy = f(jet(x).derivative1(), jet(y).derivative2());
    std::array::from_fn(|k| Taylor {
        v: xx[k].re,
        d: [xx[k].eps1, yy[k].eps1],
        dd: [
            [xx[k].eps1eps2, xy[k].eps1eps2],
            [xy[k].eps1eps2, yy[k].eps1eps2],
        ],
    })
}

const W1: [(f64, f64); 2] = [(1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
const W2: [(f64, f64); 2] = [(1.0, 16.0 / 12.0), (2.0, -1.0 / 12.0)];

/// Fourth-order central stencils for value, gradient and Hessian.
fn stencil_jets<const N: usize>(
    f: &impl Fn(f64, f64) -> [f64; N],
    x: f64,
    y: f64,
    hx: f64,
    hy: f64,
) -> [Taylor; N] {
    let c = f(x, y);
    let mut out = [Taylor::default(); N];
    for k in 0..N {
        out[k].v = c[k];
        out[k].dd[0][0] = -2.5 * c[k];
        out[k].dd[1][1] = -2.5 * c[k];
    }
    for (s, w) in W1 {
        let (xp, xm) = (f(x + s * hx, y), f(x - s * hx, y));
        let (yp, ym) = (f(x, y + s * hy), f(x, y - s * hy));
        for k in 0..N {
            out[k].d[0] += w * (xp[k] - xm[k]) / hx;
            out[k].d[1] += w * (yp[k] - ym[k]) / hy;
        }
        for (t, v) in W1 {
            let pp = f(x + s * hx, y + t * hy);
            let pm = f(x + s * hx, y - t * hy);
            let mp = f(x - s * hx, y + t * hy);
            let mm = f(x - s * hx, y - t * hy);
            for k in 0..N {
                out[k].dd[0][1] += w * v * (pp[k] - pm[k] - mp[k] + mm[k]) / (hx * hy);
            }
        }
    }
    for (s, w) in W2 {
        let (xp, xm) = (f(x + s * hx, y), f(x - s * hx, y));
        let (yp, ym) = (f(x, y + s * hy), f(x, y - s * hy));
        for k in 0..N {
            out[k].dd[0][0] += w * (xp[k] + xm[k]);
            out[k].dd[1][1] += w * (yp[k] + ym[k]);
        }
    }
    for t in &mut out {
        t.dd[0][0] /= hx * hx;
        t.dd[1][1] /= hy * hy;
        t.dd[1][0] = t.dd[0][1];
    }
    out
}

/// Stencil jets at `h` and `h/2`, Richardson-extrapolated.
fn richardson_jets<const N: usize>(
    f: impl Fn(f64, f64) -> [f64; N],
    x: f64,
    y: f64,
    hx: f64,
    hy: f64,
) -> [Taylor; N] {
    let coarse = stencil_jets(&f, x, y, hx, hy);
    let fine = stencil_jets(&f, x, y, hx / 2.0, hy / 2.0);
    std::array::from_fn(|k| {
        let mut t = Taylor::combine(&[(16.0 / 15.0, &fine[k]), (-1.0 / 15.0, &coarse[k])]);
        t.v = fine[k].v;
        t
    })
}

/// How derivatives of the metric closures are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Hyper-dual evaluation.
    Exact,
    /// Fourth-order central differences at steps `h` and `h/2`, Richardson-extrapolated.
    /// `relative_step` is a fraction of each domain width; `None` uses `width / (4k)`.
    FiniteDifference { relative_step: Option<f64> },
}

/// Jets of `A, B, h11, h12, h22` at a point.
fn local_jets(tm: &TorusMetric, x: f64, y: f64, steps: Option<(f64, f64)>) -> [Taylor; 5] {
    let pack = |r: Jet, t: Jet| {
        let h = (tm.h)(r, t);
        [(tm.a)(r, t), (tm.b)(r, t), h[0], h[1], h[2]]
    };
    match steps {
        None => exact_jets(pack, x, y),
        Some((hx, hy)) => richardson_jets(|r, t| pack(jet(r), jet(t)).map(|v| v.re), x, y, hx, hy),
    }
}

type M2 = [[f64; 2]; 2];

fn mat(t: &[Taylor; 3], f: impl Fn(&Taylor) -> f64) -> M2 {
    let (a, b, c) = (f(&t[0]), f(&t[1]), f(&t[2]));
    [[a, b], [b, c]]
}

fn mul(p: &M2, q: &M2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| p[i][0] * q[0][j] + p[i][1] * q[1][j]))
}

fn lin(terms: &[(f64, &M2)]) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| terms.iter().map(|(c, m)| c * m[i][j]).sum()))
}

fn det(m: &M2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn inv(m: &M2) -> M2 {
    let d = det(m);
    [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]]
}

fn trace(m: &M2) -> f64 {
    m[0][0] + m[1][1]
}

fn frob(p: &M2, q: &M2) -> f64 {
    (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| p[i][j] * q[i][j])
        .sum()
}

fn max_abs(m: &M2) -> f64 {
    m.iter().flatten().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Christoffel symbols `Γ^c_ab` and inverse metric of `A dR² + B dθ²`.
struct Base {
    gi: [f64; 2],
    gamma: [[[f64; 2]; 2]; 2],
    scalar: f64,
    g: [f64; 2],
}

impl Base {
    fn new(a: &Taylor, b: &Taylor) -> Base {
        let (av, bv) = (a.v, b.v);
        let mut gamma = [[[0.0; 2]; 2]; 2];
        gamma[0][0][0] = a.d[0] / (2.0 * av);
        gamma[0][0][1] = a.d[1] / (2.0 * av);
        gamma[0][1][0] = gamma[0][0][1];
        gamma[0][1][1] = -b.d[0] / (2.0 * av);
        gamma[1][0][0] = -a.d[1] / (2.0 * bv);
        gamma[1][0][1] = b.d[0] / (2.0 * bv);
        gamma[1][1][0] = gamma[1][0][1];
        gamma[1][1][1] = b.d[1] / (2.0 * bv);
        // Brioschi form of the Gauss curvature for an orthogonal metric
        let eg = av * bv;
        let gauss = -(b.dd[0][0] + a.dd[1][1]) / (2.0 * eg)
            + (b.d[0] * (a.d[0] * bv + av * b.d[0]) + a.d[1] * (a.d[1] * bv + av * b.d[1]))
                / (4.0 * eg * eg);
        Base {
            gi: [1.0 / av, 1.0 / bv],
            gamma,
            scalar: 2.0 * gauss,
            g: [av, bv],
        }
    }

    fn hessian(&self, t: &Taylor) -> [[f64; 2]; 2] {
        std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                t.dd[a][b] - (0..2).map(|c| self.gamma[c][a][b] * t.d[c]).sum::<f64>()
            })
        })
    }

    fn laplacian(&self, t: &Taylor) -> f64 {
        let hs = self.hessian(t);
        self.gi[0] * hs[0][0] + self.gi[1] * hs[1][1]
    }
}

fn check_metric_point(tm: &TorusMetric, x: f64, y: f64, j: &[Taylor; 5]) -> Result<()> {
    let h = [[j[2].v, j[3].v], [j[3].v, j[4].v]];
    if !(j[0].v > 0.0 && j[1].v > 0.0 && h[0][0] > 0.0 && det(&h) > 0.0) {
        return Err(Error::NotMetricPoint(format!(
            "{}: metric not positive definite at (R, θ) = ({x}, {y})",
            tm.name
        )));
    }
    Ok(())
}

/// Max residuals of the fiber equation and the base equation at one point.
fn residual_at(tm: &TorusMetric, j: &[Taylor; 5]) -> (f64, f64) {
    let base = Base::new(&j[0], &j[1]);
    let hj = [j[2], j[3], j[4]];
    let h = mat(&hj, |t| t.v);
    let dh: [M2; 2] = std::array::from_fn(|c| mat(&hj, |t| t.d[c]));
    let hess: [[M2; 2]; 2] = {
        let per: Vec<[[f64; 2]; 2]> = hj.iter().map(|t| base.hessian(t)).collect();
        std::array::from_fn(|a| {
            std::array::from_fn(|b| [[per[0][a][b], per[1][a][b]], [per[1][a][b], per[2][a][b]]])
        })
    };
    let hinv = inv(&h);
    let dethv = det(&h);
    let lap = lin(&[(base.gi[0], &hess[0][0]), (base.gi[1], &hess[1][1])]);
    let ddet: [f64; 2] = std::array::from_fn(|c| dethv * trace(&mul(&hinv, &dh[c])));
    let dhinv: [M2; 2] = std::array::from_fn(|c| lin(&[(-1.0, &mul(&mul(&hinv, &dh[c]), &hinv))]));
    let cross = lin(&[
        (base.gi[0], &mul(&dhinv[0], &dh[0])),
        (base.gi[1], &mul(&dhinv[1], &dh[1])),
    ]);
    let fiber = lin(&[
        (-0.5, &lap),
        (-0.25 * base.gi[0] * ddet[0] / dethv, &dh[0]),
        (-0.25 * base.gi[1] * ddet[1] / dethv, &dh[1]),
        (-0.5, &mul(&h, &cross)),
        (-tm.lambda, &h),
    ]);
    let rhs = tm.lambda - base.scalar / 2.0;
    let mut r4 = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            let lhs = -0.5 * frob(&hinv, &hess[a][b]) - 0.25 * frob(&dhinv[a], &dh[b]);
            let target = if a == b { rhs * base.g[a] } else { 0.0 };
            r4 = r4.max((lhs - target).abs());
        }
    }
    (max_abs(&fiber), r4)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EinsteinResidual {
    pub metric: String,
    pub lambda: f64,
    pub grid: usize,
    pub scheme: Scheme,
    /// Max over the grid of the fiber (`h_ij`) equation.
    pub fiber: f64,
    /// Max over the grid of the base (`ǧ_ab`) equation.
    pub base: f64,
    pub max: f64,
    pub worst_point: (f64, f64),
}

/// Max residual of the T²-Einstein system on the `k × k` cell-centre grid.
pub fn torus_einstein_residual(
    tm: &TorusMetric,
    k: usize,
    scheme: Scheme,
) -> Result<EinsteinResidual> {
    if k == 0 {
        return Err(Error::InvalidInput("grid must be at least 1×1".into()));
    }
    let (wr, wt) = tm.domain.widths();
    let steps = match scheme {
        Scheme::Exact => None,
        Scheme::FiniteDifference { relative_step } => {
            let s = relative_step.unwrap_or(1.0 / (4.0 * k as f64));
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidInput(format!("step {s} must be positive")));
            }
            Some((s * wr, s * wt))
        }
    };
    type Row = Vec<(f64, f64, (f64, f64))>;
    let rows: Vec<Result<Row>> = (0..k)
        .into_par_iter()
        .map(|i| {
            (0..k)
                .map(|j| {
                    let (x, y) = tm.domain.point(i, j, k);
                    let jets = local_jets(tm, x, y, steps);
                    check_metric_point(tm, x, y, &jets)?;
                    let (r3, r4) = residual_at(tm, &jets);
                    Ok((r3, r4, (x, y)))
                })
                .collect()
        })
        .collect();
    let mut out = EinsteinResidual {
        metric: tm.name.clone(),
        lambda: tm.lambda,
        grid: k,
        scheme,
        fiber: 0.0,
        base: 0.0,
        max: 0.0,
        worst_point: tm.domain.centre(),
    };
    for row in rows {
        for (r3, r4, p) in row? {
            out.fiber = out.fiber.max(r3);
            out.base = out.base.max(r4);
            if r3.max(r4) > out.max {
                out.max = r3.max(r4);
                out.worst_point = p;
            }
        }
    }
    Ok(out)
}

/// Einstein constant read off the trace equation `Δ̌ρ = −2λρ` at one point.
pub fn trace_lambda(tm: &TorusMetric, x: f64, y: f64) -> Result<f64> {
    let jets = local_jets(tm, x, y, None);
    check_metric_point(tm, x, y, &jets)?;
    let [rho] = exact_jets(
        |r, t| {
            let h = (tm.h)(r, t);
            [(h[0] * h[2] - h[1] * h[1]).sqrt()]
        },
        x,
        y,
    );
    let base = Base::new(&jets[0], &jets[1]);
    Ok(-base.laplacian(&rho) / (2.0 * rho.v))
}

// ---------------------------------------------------------------------------
// Catalog

fn one(_: Jet, _: Jet) -> Jet {
    jet(1.0)
}

fn sin2(x: Jet) -> Jet {
    x.sin().powi(2)
}

/// Root of `4ν(3+ν²) = 3 + 6ν² − ν⁴` in (0.28, 0.29).
pub fn page_nu() -> f64 {
    let g = |v: f64| 4.0 * v * (3.0 + v * v) - (3.0 + 6.0 * v * v - v.powi(4));
    let (mut lo, mut hi) = (0.28, 0.29);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if g(lo) * g(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn page_metric() -> Result<TorusMetric> {
    let nu = page_nu();
    let n2 = nu * nu;
    let scale = 3.0 * (1.0 + n2);
    let q = 3.0 + 6.0 * n2 - n2 * n2;
    let p = move |r: Jet| jet(3.0 - n2) - r.cos().powi(2) * (n2 * (1.0 + n2));
    let w = move |r: Jet| jet(1.0) - r.cos().powi(2) * n2;
    let mut tm = TorusMetric {
        name: "page".into(),
        a: Arc::new(move |r, _| w(r) / p(r) * scale),
        b: Arc::new(move |r, _| w(r) * (scale / q)),
        h: Arc::new(move |r, t| {
            let f = w(r) * sin2(t) * (scale / q);
            let g = p(r) * sin2(r) / w(r) * (scale / (3.0 + n2).powi(2));
            let s = sin2(t * 0.5);
            [f + g * s * s, -g * s, g]
        }),
        domain: Domain {
            r: (0.0, PI),
            theta: (0.0, PI),
        },
        lambda: f64::NAN,
    };
    let (x, y) = tm.domain.centre();
    tm.lambda = trace_lambda(&tm, x, y)?;
    Ok(tm)
}

/// Einstein metrics with T² symmetry: `s4`, `cp2`, `s2xs2`, `page`.
pub fn metric_catalog(name: &str) -> Result<TorusMetric> {
    let half = (0.0, PI / 2.0);
    let full = (0.0, PI);
    Ok(match name {
        "s4" => TorusMetric {
            name: name.into(),
            a: Arc::new(one),
            b: Arc::new(|r, _| sin2(r)),
            h: Arc::new(|r, t| [sin2(r) * sin2(t), jet(0.0), sin2(r) * t.cos().powi(2)]),
            domain: Domain {
                r: full,
                theta: half,
            },
            lambda: 3.0,
        },
        "cp2" => TorusMetric {
            name: name.into(),
            a: Arc::new(one),
            b: Arc::new(|r, _| sin2(r)),
            h: Arc::new(|r, t| {
                let (s, a, c) = (sin2(r), sin2(t), t.cos().powi(2));
                [
                    s * a * (jet(1.0) - s * a),
                    -(s * s * a * c),
                    s * c * (jet(1.0) - s * c),
                ]
            }),
            domain: Domain {
                r: half,
                theta: half,
            },
            lambda: 6.0,
        },
        "s2xs2" => TorusMetric {
            name: name.into(),
            a: Arc::new(one),
            b: Arc::new(one),
            h: Arc::new(|r, t| [sin2(r), jet(0.0), sin2(t)]),
            domain: Domain {
                r: full,
                theta: full,
            },
            lambda: 1.0,
        },
        "page" => page_metric()?,
        _ => return Err(Error::UnknownName(name.to_string())),
    })
}

/// Orbit data of the catalog entries, listed in the order of their sides.
pub fn catalog_orbit(name: &str) -> Result<OrbitData> {
    let pairs = match name {
        "s4" => vec![(1, 0), (0, 1)],
        "cp2" => vec![(0, 1), (1, 0), (1, 1)],
        "s2xs2" => vec![(0, 1), (1, 0), (0, 1), (1, 0)],
        "page" => vec![(0, 1), (1, 1), (0, 1), (1, 0)],
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    OrbitData::new(pairs)
}

// ---------------------------------------------------------------------------
// Isothermal form

/// `ǧ = Ω²(dx² + dy²)` with fiber matrix `h`.
#[derive(Clone)]
pub struct IsothermalMetric {
    pub name: String,
    pub omega: ScalarField,
    pub h: FiberField,
    pub domain: Domain,
}

impl fmt::Debug for IsothermalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsothermalMetric")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Catalog metrics whose base is conformally flat in the listed coordinates.
pub fn isothermal_catalog(name: &str) -> Result<IsothermalMetric> {
    match name {
        // x = log tan(R/2), so sin R = sech x
        "s4" => Ok(IsothermalMetric {
            name: name.into(),
            omega: Arc::new(|x, _| x.cosh().recip()),
            h: Arc::new(|x, y| {
                let s = x.cosh().powi(-2);
                [s * sin2(y), jet(0.0), s * y.cos().powi(2)]
            }),
            domain: Domain {
                r: (-3.0, 3.0),
                theta: (0.0, PI / 2.0),
            },
        }),
        "s2xs2" => Ok(IsothermalMetric {
            name: name.into(),
            omega: Arc::new(one),
            h: Arc::new(|x, y| [sin2(x), jet(0.0), sin2(y)]),
            domain: Domain {
                r: (0.0, PI),
                theta: (0.0, PI),
            },
        }),
        "cp2" | "page" => Err(Error::Unsupported(format!(
            "no isothermal coordinates are available for `{name}`"
        ))),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

type CM2 = [[Complex64; 2]; 2];

/// `ρQ` at one point, with `∂ = ½(∂x − i∂y)`.
pub fn rho_q(iso: &IsothermalMetric, x: f64, y: f64) -> Complex64 {
    let [om, h11, h12, h22, rho] = exact_jets(
        |a, b| {
            let h = (iso.h)(a, b);
            let rho = (h[0] * h[2] - h[1] * h[1]).sqrt();
            [(iso.omega)(a, b), h[0], h[1], h[2], rho]
        },
        x,
        y,
    );
    let i = Complex64::i();
    let del = |t: &Taylor| 0.5 * (t.d[0] - i * t.d[1]);
    let deldel = |t: &Taylor| 0.25 * (t.dd[0][0] - t.dd[1][1] - 2.0 * i * t.dd[0][1]);
    let h = [[h11.v, h12.v], [h12.v, h22.v]];
    let hinv = inv(&h);
    let dh: CM2 = [[del(&h11), del(&h12)], [del(&h12), del(&h22)]];
    let drho = del(&rho) / rho.v;
    // K⁻¹∂K = h⁻¹∂h − ∂ρ/ρ
    let m: CM2 = std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            hinv[a][0] * dh[0][b] + hinv[a][1] * dh[1][b] - if a == b { drho } else { 0.0.into() }
        })
    });
    let tr_mm: Complex64 = (0..2)
        .flat_map(|a| (0..2).map(move |b| (a, b)))
        .map(|(a, b)| m[a][b] * m[b][a])
        .sum();
    let q = 8.0 * del(&om) / om.v * drho - 4.0 * deldel(&rho) / rho.v + 2.0 * drho * drho - tr_mm;
    rho.v * q
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RhoQReport {
    pub metric: String,
    pub grid: usize,
    /// Max of `|∂̄(ρQ)|` over the grid.
    pub residual: f64,
    pub max_abs_rho_q: f64,
}

/// Cauchy–Riemann defect of `ρQ` on the `k × k` cell-centre grid.
pub fn rhoq_holomorphicity(iso: &IsothermalMetric, k: usize) -> Result<RhoQReport> {
    if k == 0 {
        return Err(Error::InvalidInput("grid must be at least 1×1".into()));
    }
    let (wx, wy) = iso.domain.widths();
    let (hx, hy) = (1e-3 * wx, 1e-3 * wy);
    let rows: Vec<Vec<(f64, f64)>> = (0..k)
        .into_par_iter()
        .map(|i| {
            (0..k)
                .map(|j| {
                    let (x, y) = iso.domain.point(i, j, k);
                    let mut fx = Complex64::new(0.0, 0.0);
                    let mut fy = Complex64::new(0.0, 0.0);
                    for (s, w) in W1 {
                        fx += w * (rho_q(iso, x + s * hx, y) - rho_q(iso, x - s * hx, y)) / hx;
                        fy += w * (rho_q(iso, x, y + s * hy) - rho_q(iso, x, y - s * hy)) / hy;
                    }
                    let dbar = 0.5 * (fx + Complex64::i() * fy);
                    (dbar.norm(), rho_q(iso, x, y).norm())
                })
                .collect()
        })
        .collect();
    let (residual, max_abs_rho_q) = rows
        .iter()
        .flatten()
        .fold((0.0f64, 0.0f64), |(r, q), (a, b)| (r.max(*a), q.max(*b)));
    Ok(RhoQReport {
        metric: iso.name.clone(),
        grid: k,
        residual,
        max_abs_rho_q,
    })
}

// ---------------------------------------------------------------------------
// Bolts

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    RMin,
    RMax,
    ThetaMin,
    ThetaMax,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::RMin, Side::RMax, Side::ThetaMin, Side::ThetaMax];

    /// Point at fraction `s ∈ [0, 1]` along the side.
    fn point(self, d: &Domain, s: f64) -> (f64, f64) {
        let lerp = |(a, b): (f64, f64), s: f64| a + s * (b - a);
        match self {
            Side::RMin => (d.r.0, lerp(d.theta, s)),
            Side::RMax => (d.r.1, lerp(d.theta, s)),
            Side::ThetaMin => (lerp(d.r, s), d.theta.0),
            Side::ThetaMax => (lerp(d.r, s), d.theta.1),
        }
    }

    fn along_r(self) -> bool {
        matches!(self, Side::ThetaMin | Side::ThetaMax)
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::RMin => "r_min",
            Side::RMax => "r_max",
            Side::ThetaMin => "theta_min",
            Side::ThetaMax => "theta_max",
        })
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Side::ALL
            .into_iter()
            .find(|side| side.to_string() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

const DEGENERACY_TOL: f64 = 1e-10;

fn killing_norm(tm: &TorusMetric, (m, n): (i64, i64), x: f64, y: f64) -> f64 {
    let h = (tm.h)(jet(x), jet(y));
    let (m, n) = (m as f64, n as f64);
    m * m * h[0].re + 2.0 * m * n * h[1].re + n * n * h[2].re
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceGravity {
    pub side: Side,
    pub pair: (i64, i64),
    /// `(R, θ, κ²)` at each sample.
    pub samples: Vec<(f64, f64, f64)>,
    pub mean: f64,
    /// `max − min` of κ² along the side.
    pub spread: f64,
}

/// κ² along a bolt of `m∂_φ + n∂_ψ` from `m²Δh₁₁ + 2mnΔh₁₂ + n²Δh₂₂ = 2κ²`.
pub fn surface_gravity(
    tm: &TorusMetric,
    side: Side,
    pair: (i64, i64),
    samples: usize,
) -> Result<SurfaceGravity> {
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let (m, n) = (pair.0 as f64, pair.1 as f64);
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let (x, y) = side.point(&tm.domain, (i as f64 + 0.5) / samples as f64);
        let norm = killing_norm(tm, pair, x, y);
        if norm.abs() > DEGENERACY_TOL {
            return Err(Error::NotDegenerate(format!(
                "|{}∂φ + {}∂ψ|² = {norm:e} at (R, θ) = ({x}, {y}) on side {side}",
                pair.0, pair.1
            )));
        }
        let j = local_jets(tm, x, y, None);
        if !(j[0].v > 0.0 && j[1].v > 0.0) {
            return Err(Error::Precondition(format!(
                "base metric degenerates along side {side}"
            )));
        }
        let base = Base::new(&j[0], &j[1]);
        let f = Taylor::combine(&[(m * m, &j[2]), (2.0 * m * n, &j[3]), (n * n, &j[4])]);
        out.push((x, y, base.laplacian(&f) / 2.0));
    }
    let (lo, hi, sum) = out.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, 0.0),
        |(lo, hi, s), &(_, _, k)| (lo.min(k), hi.max(k), s + k),
    );
    Ok(SurfaceGravity {
        side,
        pair,
        mean: sum / samples as f64,
        spread: hi - lo,
        samples: out,
    })
}

/// Sides of the domain that are bolts, each with a primitive degenerating pair.
pub fn bolt_sides(tm: &TorusMetric) -> Vec<(Side, (i64, i64))> {
    const CANDIDATES: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (1, -1)];
    Side::ALL
        .into_iter()
        .filter_map(|side| {
            let probe: Vec<(f64, f64)> = [0.25, 0.5, 0.75]
                .iter()
                .map(|&s| side.point(&tm.domain, s))
                .collect();
            let base_ok = probe.iter().all(|&(x, y)| {
                let (a, b) = ((tm.a)(jet(x), jet(y)).re, (tm.b)(jet(x), jet(y)).re);
                a > DEGENERACY_TOL && b > DEGENERACY_TOL
            });
            if !base_ok {
                return None;
            }
            CANDIDATES
                .into_iter()
                .find(|&p| {
                    probe
                        .iter()
                        .all(|&(x, y)| killing_norm(tm, p, x, y).abs() <= DEGENERACY_TOL)
                })
                .map(|p| (side, p))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoltAreas {
    /// `2π Σ Area(A_i)` over bolts of `∂_φ`.
    pub a_total: f64,
    /// `2π Σ Area(B_i)` over bolts of `∂_ψ`.
    pub b_total: f64,
    pub volume: f64,
    pub lambda_volume: f64,
    pub relative_error: f64,
}

fn simpson_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|i| match i {
            0 => 1.0,
            i if i == n => 1.0,
            i if i % 2 == 1 => 4.0,
            _ => 2.0,
        })
        .map(|w| w / 3.0)
        .collect()
}

/// Bolt areas against `λ Vol(M)` for a diagonal fiber metric, by composite Simpson
/// with `intervals` panels per direction.
pub fn bolt_area_identity(tm: &TorusMetric, intervals: usize) -> Result<BoltAreas> {
    if intervals < 2 || intervals % 2 == 1 {
        return Err(Error::InvalidInput(format!(
            "Simpson needs an even number of intervals, got {intervals}"
        )));
    }
    let n = intervals;
    let w = simpson_weights(n);
    let d = tm.domain;
    let eval = |x: f64, y: f64| {
        let h = (tm.h)(jet(x), jet(y));
        let (a, b) = ((tm.a)(jet(x), jet(y)).re, (tm.b)(jet(x), jet(y)).re);
        (a, b, h.map(|v| v.re))
    };
    for i in 0..=8 {
        for j in 0..=8 {
            let (x, y) = (
                d.r.0 + i as f64 / 8.0 * (d.r.1 - d.r.0),
                d.theta.0 + j as f64 / 8.0 * (d.theta.1 - d.theta.0),
            );
            let h12 = eval(x, y).2[1];
            if h12.abs() > 1e-12 {
                return Err(Error::Precondition(format!(
                    "fiber metric is not diagonal: h12 = {h12:e} at ({x}, {y})"
                )));
            }
        }
    }
    let root = |v: f64| v.max(0.0).sqrt();
    let (mut a_sum, mut b_sum) = (0.0, 0.0);
    for side in Side::ALL {
        let len = if side.along_r() {
            d.r.1 - d.r.0
        } else {
            d.theta.1 - d.theta.0
        };
        let pts: Vec<(f64, [f64; 3])> = (0..=n)
            .map(|i| {
                let (x, y) = side.point(&d, i as f64 / n as f64);
                let (a, b, h) = eval(x, y);
                (if side.along_r() { a } else { b }, h)
            })
            .collect();
        let integral = |k: usize| -> f64 {
            pts.iter()
                .zip(&w)
                .map(|((g, h), wi)| wi * root(h[k]) * root(*g))
                .sum::<f64>()
                * len
                / n as f64
        };
        if pts.iter().all(|p| p.1[0].abs() <= 1e-12) {
            a_sum += integral(2);
        }
        if pts.iter().all(|p| p.1[2].abs() <= 1e-12) {
            b_sum += integral(0);
        }
    }
    let (wr, wt) = d.widths();
    let (dr, dt) = (wr / n as f64, wt / n as f64);
    let volume: f64 = (0..=n)
        .into_par_iter()
        .map(|i| {
            (0..=n)
                .map(|j| {
                    let (a, b, h) = eval(d.r.0 + i as f64 * dr, d.theta.0 + j as f64 * dt);
                    w[i] * w[j] * root(h[0] * h[2] * a * b)
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        * dr
        * dt;
    let four_pi2 = 4.0 * PI * PI;
    let (a_total, b_total) = (four_pi2 * a_sum, four_pi2 * b_sum);
    let volume = four_pi2 * volume;
    let lambda_volume = tm.lambda * volume;
    let relative_error = [
        a_total - b_total,
        a_total - lambda_volume,
        b_total - lambda_volume,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()))
        / lambda_volume.abs();
    Ok(BoltAreas {
        a_total,
        b_total,
        volume,
        lambda_volume,
        relative_error,
    })
}
