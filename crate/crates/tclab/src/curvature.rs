//! Curvature of (fiberwise) Kähler toric metrics in symplectic coordinates.
//!
//! Every quantity here is computed exactly from the order-2 jets of `h` and `D = det h`
//! produced by [`metric_at`]. Fiber weights add the coupling terms of metrics of the form
//! `h⁻¹ ⊕ h ⊕ A_1 Id_{d_1} ⊕ … ⊕ A_m Id_{d_m}` with `A_j` affine.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::linalg::{rank, solve, RatMatrix};
use crate::exactalg::rational::{format_rat, int, rat, rat_abs, rat_string, vec_rat_string};
use crate::exactalg::Rational;
use crate::potential::{metric_at, Jet, MetricPoint, Potential};

fn unit(n: usize, i: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] += 1;
    e[j] += 1;
    e
}

fn e1(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

/// `S = −Σ ∂_i∂_j h_ij` from a computed metric point.
pub fn abreu_scalar_at(mp: &MetricPoint) -> Rational {
    let n = mp.h.len();
    let mut s = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            s -= mp.h_jets[i][j].partial(&unit(n, i, j));
        }
    }
    s
}

/// `S = −(1/D) h_ij ∂_i∂_j D`.
pub fn abreu_scalar_simplified_at(mp: &MetricPoint) -> Rational {
    let n = mp.h.len();
    let mut s = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            s += &mp.h[i][j] * mp.det_h_jet.partial(&unit(n, i, j));
        }
    }
    -s / &mp.det_h
}

pub fn abreu_scalar(pot: &Potential, x: &[Rational]) -> Result<Rational> {
    Ok(abreu_scalar_at(&metric_at(pot, x)?))
}

pub fn abreu_scalar_simplified(pot: &Potential, x: &[Rational]) -> Result<Rational> {
    Ok(abreu_scalar_simplified_at(&metric_at(pot, x)?))
}

/// Jets of the adjugate `ℳ = h/D` of `h⁻¹`.
fn adjugate_jets(mp: &MetricPoint) -> Vec<Vec<Jet>> {
    let dinv = mp
        .det_h_jet
        .recip()
        .expect("det h is nonzero at a metric point");
    mp.h_jets
        .iter()
        .map(|r| r.iter().map(|e| e * &dinv).collect())
        .collect()
}

/// `(Σ_i ∂_i ℳ_ij)_j`, identically zero.
pub fn adjugate_divergence(pot: &Potential, x: &[Rational]) -> Result<Vec<Rational>> {
    let mp = metric_at(pot, x)?;
    let m = adjugate_jets(&mp);
    let n = m.len();
    Ok((0..n)
        .map(|j| (0..n).fold(Rational::zero(), |acc, i| acc + m[i][j].partial(&e1(n, i))))
        .collect())
}

/// Value, gradient and Hessian of a torus-invariant function at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionJet {
    pub value: Rational,
    pub gradient: Vec<Rational>,
    pub hessian: RatMatrix,
}

impl FunctionJet {
    pub fn constant(n: usize, c: Rational) -> Self {
        FunctionJet {
            value: c,
            gradient: vec![Rational::zero(); n],
            hessian: vec![vec![Rational::zero(); n]; n],
        }
    }

    /// The affine function `Σ α_k x_k + β` at `x`.
    pub fn affine(alpha: &[Rational], beta: &Rational, x: &[Rational]) -> Self {
        let n = alpha.len();
        let value = alpha
            .iter()
            .zip(x)
            .fold(beta.clone(), |acc, (a, xi)| acc + a * xi);
        FunctionJet {
            value,
            gradient: alpha.to_vec(),
            hessian: vec![vec![Rational::zero(); n]; n],
        }
    }
}

/// `(Δf, Δ̌f)` with `Δf = h_ij f_ij + (1/D) h_ij D_i f_j` and the quotient Laplacian
/// `Δ̌f = h_ij f_ij + ½(1/D) h_ij D_j f_i`.
pub fn laplacians(
    pot: &Potential,
    f: &FunctionJet,
    x: &[Rational],
) -> Result<(Rational, Rational)> {
    let mp = metric_at(pot, x)?;
    Ok(laplacians_at(&mp, f))
}

pub fn laplacians_at(mp: &MetricPoint, f: &FunctionJet) -> (Rational, Rational) {
    let n = mp.h.len();
    let mut second = Rational::zero();
    let mut first = Rational::zero();
    for i in 0..n {
        for j in 0..n {
            second += &mp.h[i][j] * &f.hessian[i][j];
            first += &mp.h[i][j] * mp.det_h_jet.partial(&e1(n, i)) * &f.gradient[j];
        }
    }
    let first = first / &mp.det_h;
    (&second + &first, &second + first * rat(1, 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalFit {
    #[serde(with = "vec_rat_string")]
    pub alpha: Vec<Rational>,
    #[serde(with = "rat_string")]
    pub beta: Rational,
    #[serde(with = "rat_string")]
    pub max_residual: Rational,
}

/// Exact least-squares fit `S ≈ Σ α_k x_k + β` over the sample points.
pub fn extremal_fit(pot: &Potential, points: &[Vec<Rational>]) -> Result<ExtremalFit> {
    let n = pot.dim();
    let rows: Vec<Vec<Rational>> = points
        .iter()
        .map(|p| {
            let mut r = p.clone();
            r.push(Rational::one());
            r
        })
        .collect();
    if rows.len() < n + 1 || rank(&rows) < n + 1 {
        return Err(Error::Degenerate(
            "need n+1 affinely independent sample points".into(),
        ));
    }
    let s: Vec<Rational> = points
        .iter()
        .map(|p| abreu_scalar(pot, p))
        .collect::<Result<_>>()?;
    let m = n + 1;
    let mut ata = vec![vec![Rational::zero(); m]; m];
    let mut atb = vec![Rational::zero(); m];
    for (r, sv) in rows.iter().zip(&s) {
        for i in 0..m {
            atb[i] += &r[i] * sv;
            for j in 0..m {
                ata[i][j] += &r[i] * &r[j];
            }
        }
    }
    let coef = solve(&ata, &atb)
        .ok_or_else(|| Error::Degenerate("normal equations are singular".into()))?;
    let max_residual = rows
        .iter()
        .zip(&s)
        .map(|(r, sv)| {
            rat_abs(
                &(sv - r
                    .iter()
                    .zip(&coef)
                    .fold(Rational::zero(), |acc, (a, c)| acc + a * c)),
            )
        })
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(ExtremalFit {
        alpha: coef[..n].to_vec(),
        beta: coef[n].clone(),
        max_residual,
    })
}

/// `ℳ_ik ∂_k(ℳ_lj ∂_l D) + 2λ ℳ_ij`, zero iff the differentiated Einstein condition holds at `x`.
pub fn einstein_residual(pot: &Potential, lambda: &Rational, x: &[Rational]) -> Result<RatMatrix> {
    let mp = metric_at(pot, x)?;
    let m = adjugate_jets(&mp);
    let n = m.len();
    let dd: Vec<Jet> = (0..n).map(|l| mp.det_h_jet.d(l)).collect();
    let g: Vec<Jet> = (0..n)
        .map(|j| (0..n).fold(Jet::zero(n, 1), |acc, l| &acc + &(&m[l][j] * &dd[l])))
        .collect();
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let t = (0..n).fold(Rational::zero(), |acc, k| {
                        acc + m[i][k].value() * g[j].partial(&e1(n, k))
                    });
                    t + int(2) * lambda * m[i][j].value()
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub d: u32,
    #[serde(with = "vec_rat_string")]
    pub b: Vec<Rational>,
    #[serde(with = "rat_string")]
    pub a: Rational,
}

/// Fiber weights `A_j(x) = Σ_k b_kj x_k + a_j` with even fiber dimensions `d_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberWeight {
    pub entries: Vec<WeightEntry>,
}

impl FiberWeight {
    pub fn empty() -> Self {
        FiberWeight { entries: vec![] }
    }

    pub fn new(entries: Vec<WeightEntry>) -> Result<Self> {
        if let Some(e) = entries.iter().find(|e| e.d < 2 || e.d % 2 != 0) {
            return Err(Error::InvalidInput(format!(
                "fiber dimension d = {} must be even and at least 2",
                e.d
            )));
        }
        Ok(FiberWeight { entries })
    }

    /// Cohomogeneity-one data `(d_j, b_j, a_j)`.
    pub fn from_cohom1(w: &crate::cohom1::FiberData) -> Self {
        FiberWeight {
            entries: w
                .entries()
                .iter()
                .map(|e| WeightEntry {
                    d: e.d,
                    b: vec![e.b.clone()],
                    a: e.a.clone(),
                })
                .collect(),
        }
    }

    fn values(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(j, e)| {
                if e.b.len() != x.len() {
                    return Err(Error::InvalidInput(format!(
                        "weight {} has wrong length",
                        j + 1
                    )));
                }
                let v =
                    e.b.iter()
                        .zip(x)
                        .fold(e.a.clone(), |acc, (b, xi)| acc + b * xi);
                if !v.is_positive() {
                    return Err(Error::Precondition(format!(
                        "A_{} = {} ≤ 0 at this point",
                        j + 1,
                        format_rat(&v)
                    )));
                }
                Ok(v)
            })
            .collect()
    }
}

/// Scalar curvature of a fiberwise Kähler toric metric.
pub fn fkt_scalar(pot: &Potential, w: &FiberWeight, x: &[Rational]) -> Result<Rational> {
    let a = w.values(x)?;
    let mp = metric_at(pot, x)?;
    let n = mp.h.len();
    let h = &mp.h;
    let dgrad: Vec<Rational> = (0..n).map(|k| mp.det_h_jet.partial(&e1(n, k))).collect();
    let mut s = abreu_scalar_simplified_at(&mp);
    for (r, er) in w.entries.iter().enumerate() {
        let dr = int(er.d as i64);
        let mut t1 = Rational::zero();
        let mut t2 = Rational::zero();
        for k in 0..n {
            for l in 0..n {
                t1 += &h[k][l] * &dgrad[k] * &er.b[l];
                t2 += &h[k][l] * &er.b[k] * &er.b[l];
            }
        }
        s -= &dr * t1 / (&mp.det_h * &a[r]);
        s += &dr * t2 * rat(1, 2) / (&a[r] * &a[r]);
        s += &dr / &a[r];
        for (q, eq) in w.entries.iter().enumerate() {
            let mut t3 = Rational::zero();
            for k in 0..n {
                for l in 0..n {
                    t3 += &h[k][l] * &er.b[k] * &eq.b[l];
                }
            }
            s -= &dr * int(eq.d as i64) * t3 * rat(1, 4) / (&a[r] * &a[q]);
        }
    }
    Ok(s)
}

/// Residuals of the fiberwise Einstein equations with `L = log(D V^{1/2})`:
/// `A_ij = h_ik ∂_k(h_lj ∂_l L) + 2λ h_ij` and, per fiber entry,
/// `B_i = (h_kl ∂_l L + 2λ x_k) b_ki − 2(1 − λ a_i)`.
pub fn fkt_einstein_residual(
    pot: &Potential,
    w: &FiberWeight,
    lambda: &Rational,
    x: &[Rational],
) -> Result<(RatMatrix, Vec<Rational>)> {
    w.values(x)?;
    let mp = metric_at(pot, x)?;
    let n = mp.h.len();
    let dinv = mp.det_h_jet.recip().expect("nonzero determinant");
    let grad_l: Vec<Jet> = (0..n)
        .map(|l| {
            let mut g = &mp.det_h_jet.d(l) * &dinv;
            for e in &w.entries {
                if e.b[l].is_zero() {
                    continue;
                }
                let mu: Vec<Rational> = e.b.clone();
                let a0 = mu
                    .iter()
                    .zip(x)
                    .fold(e.a.clone(), |acc, (b, xi)| acc + b * xi);
                let aj = affine_jet(&mu, a0, 1);
                let coef = int(e.d as i64) * &e.b[l] * rat(1, 2);
                g = &g + &aj.recip().expect("A_j > 0").scale(&coef);
            }
            g
        })
        .collect();
    let gj: Vec<Jet> = (0..n)
        .map(|j| {
            (0..n).fold(Jet::zero(n, 1), |acc, l| {
                &acc + &(&mp.h_jets[l][j] * &grad_l[l])
            })
        })
        .collect();
    let eq_a: RatMatrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let t = (0..n).fold(Rational::zero(), |acc, k| {
                        acc + &mp.h[i][k] * gj[j].partial(&e1(n, k))
                    });
                    t + int(2) * lambda * &mp.h[i][j]
                })
                .collect()
        })
        .collect();
    let eq_b: Vec<Rational> = w
        .entries
        .iter()
        .map(|e| {
            let t = (0..n).fold(Rational::zero(), |acc, k| {
                let v = (0..n).fold(Rational::zero(), |a2, l| {
                    a2 + &mp.h[k][l] * grad_l[l].value()
                });
                acc + (v + int(2) * lambda * &x[k]) * &e.b[k]
            });
            t - int(2) * (int(1) - lambda * &e.a)
        })
        .collect();
    Ok((eq_a, eq_b))
}

fn affine_jet(b: &[Rational], value: Rational, order: u32) -> Jet {
    let n = b.len();
    let mut j = Jet::constant(n, order, value);
    for (k, bk) in b.iter().enumerate() {
        if !bk.is_zero() {
            j = &j + &Jet::variable(n, order, k, Rational::zero()).scale(bk);
        }
    }
    j
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerdzinskiReport {
    #[serde(with = "vec_rat_string")]
    pub values: Vec<Rational>,
    pub is_constant: bool,
}

/// Values of `S³ + 6SΔS − 12|∇S|²` for affine `S = α·x + β` on a four-dimensional metric.
pub fn derdzinski_check(
    pot: &Potential,
    alpha: &[Rational],
    beta: &Rational,
    points: &[Vec<Rational>],
) -> Result<DerdzinskiReport> {
    require_dim2(pot)?;
    let values: Vec<Rational> = points
        .iter()
        .map(|x| {
            let mp = metric_at(pot, x)?;
            let f = FunctionJet::affine(alpha, beta, x);
            let (lap, _) = laplacians_at(&mp, &f);
            let grad2 = quad(&mp.h, alpha, alpha);
            let s = &f.value;
            Ok(s * s * s + int(6) * s * lap - int(12) * grad2)
        })
        .collect::<Result<_>>()?;
    let is_constant = values.windows(2).all(|w| w[0] == w[1]);
    Ok(DerdzinskiReport {
        values,
        is_constant,
    })
}

fn quad(h: &RatMatrix, u: &[Rational], v: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            s += &h[i][j] * ui * vj;
        }
    }
    s
}

fn require_dim2(pot: &Potential) -> Result<()> {
    if pot.dim() != 2 {
        return Err(Error::Unsupported(
            "this check is defined for n = 2 only".into(),
        ));
    }
    Ok(())
}

/// Residual of the Einstein equation for the conformal metric `S⁻² g`, with `S = α·x + β`:
///
/// `R_ij = −½ h_ik∂_k(h_lj ∂_l log D) + (1/S) h_ik ∂_k h_lj α_l
///        + ((1/S) h_kl ∂_k log D α_l − (3/S²) h_kl α_k α_l) h_ij − (λ/S²) h_ij`.
pub fn hermitian_einstein_toric_residual(
    pot: &Potential,
    alpha: &[Rational],
    beta: &Rational,
    lambda: &Rational,
    x: &[Rational],
) -> Result<RatMatrix> {
    require_dim2(pot)?;
    let mp = metric_at(pot, x)?;
    let s = FunctionJet::affine(alpha, beta, x).value;
    if s.is_zero() {
        return Err(Error::Singular("S vanishes at this point".into()));
    }
    let n = 2;
    let dinv = mp.det_h_jet.recip().expect("nonzero determinant");
    let dlog: Vec<Jet> = (0..n).map(|l| &mp.det_h_jet.d(l) * &dinv).collect();
    let g: Vec<Jet> = (0..n)
        .map(|j| {
            (0..n).fold(Jet::zero(n, 1), |acc, l| {
                &acc + &(&mp.h_jets[l][j] * &dlog[l])
            })
        })
        .collect();
    let sinv = Rational::one() / &s;
    let mut scalar_part = Rational::zero();
    for k in 0..n {
        for l in 0..n {
            scalar_part += &sinv * &mp.h[k][l] * dlog[k].value() * &alpha[l];
        }
    }
    scalar_part -= int(3) * &sinv * &sinv * quad(&mp.h, alpha, alpha);
    scalar_part -= lambda * &sinv * &sinv;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut r = Rational::zero();
                    for k in 0..n {
                        r -= rat(1, 2) * &mp.h[i][k] * g[j].partial(&e1(n, k));
                        for l in 0..n {
                            r += &sinv
                                * &mp.h[i][k]
                                * mp.h_jets[l][j].partial(&e1(n, k))
                                * &alpha[l];
                        }
                    }
                    r + &scalar_part * &mp.h[i][j]
                })
                .collect()
        })
        .collect())
}

/// The `λ` making the `(0,0)` entry of the conformal Einstein residual vanish at `x`.
pub fn hermitian_einstein_lambda(
    pot: &Potential,
    alpha: &[Rational],
    beta: &Rational,
    x: &[Rational],
) -> Result<Rational> {
    let r0 = hermitian_einstein_toric_residual(pot, alpha, beta, &Rational::zero(), x)?;
    let mp = metric_at(pot, x)?;
    let s = FunctionJet::affine(alpha, beta, x).value;
    Ok(&s * &s * &r0[0][0] / &mp.h[0][0])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegratedEinsteinReport {
    pub values: Vec<f64>,
    pub spread: f64,
    pub pass: bool,
}

/// Constancy of `log(det h · V^{1/2}) − Σ(−2λx_j + C_j) ∂_jΦ − 2λΦ` over sample points.
/// `Φ` is evaluated in floating point; pass iff the spread is below `tol`.
pub fn integrated_einstein_check(
    pot: &Potential,
    w: &FiberWeight,
    lambda: f64,
    c: &[f64],
    points: &[Vec<f64>],
    tol: f64,
) -> IntegratedEinsteinReport {
    let n = pot.dim();
    let values: Vec<f64> = points
        .iter()
        .map(|x| {
            let hinv = pot.hessian_f64(x);
            let det_h = 1.0 / det_f64(hinv);
            let log_v_half: f64 = w
                .entries
                .iter()
                .map(|e| {
                    let a = crate::exactalg::to_f64(&e.a)
                        + e.b
                            .iter()
                            .zip(x)
                            .map(|(b, xi)| crate::exactalg::to_f64(b) * xi)
                            .sum::<f64>();
                    0.5 * e.d as f64 * a.ln()
                })
                .sum();
            let (phi, grad) = pot.value_and_gradient_f64(x);
            let lin: f64 = (0..n)
                .map(|j| (-2.0 * lambda * x[j] + c.get(j).copied().unwrap_or(0.0)) * grad[j])
                .sum();
            det_h.ln() + log_v_half - lin - 2.0 * lambda * phi
        })
        .collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
            (l.min(*v), h.max(*v))
        });
    let spread = if values.is_empty() { 0.0 } else { hi - lo };
    IntegratedEinsteinReport {
        pass: spread.is_finite() && spread < tol,
        values,
        spread,
    }
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
        }
    }
    det
}
