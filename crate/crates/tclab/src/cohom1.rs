//! Cohomogeneity-one fiberwise Kähler toric metrics.
//!
//! The metric is determined by a profile `h(x)` on an interval and fiber data `(d_j, b_j, a_j)`
//! with `A_j = b_j x + a_j`. Writing `Q = Π A_j^{d_j/2}` and `P = hQ`, the scalar curvature
//! equation becomes `P'' = (Σ d_j/A_j − S) Q`, a polynomial identity when every `d_j` is even.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::linalg::solve;
use crate::exactalg::mpoly::MPoly;
use crate::exactalg::rational::{int, parse_rat, rat_string};
use crate::exactalg::sturm::{isolate_real_roots, sturm_sign_certificate, SignCertificate};
use crate::exactalg::{MultiRatFunc, Poly, RatFunc, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberEntry {
    pub d: u32,
    #[serde(with = "rat_string")]
    pub b: Rational,
    #[serde(with = "rat_string")]
    pub a: Rational,
}

impl FiberEntry {
    pub fn new(d: u32, b: Rational, a: Rational) -> Self {
        FiberEntry { d, b, a }
    }

    pub fn poly(&self) -> Poly {
        Poly::linear(self.b.clone(), self.a.clone())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        &self.b * x + &self.a
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FiberEntry>", into = "Vec<FiberEntry>")]
pub struct FiberData {
    entries: Vec<FiberEntry>,
}

impl TryFrom<Vec<FiberEntry>> for FiberData {
    type Error = Error;
    fn try_from(v: Vec<FiberEntry>) -> Result<Self> {
        FiberData::new(v)
    }
}

impl From<FiberData> for Vec<FiberEntry> {
    fn from(w: FiberData) -> Self {
        w.entries
    }
}

impl FiberData {
    pub fn new(entries: Vec<FiberEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput(
                "fiber data needs at least one entry".into(),
            ));
        }
        if let Some(e) = entries.iter().find(|e| e.d < 2 || e.d % 2 != 0) {
            return Err(Error::InvalidInput(format!(
                "fiber dimension d = {} must be even and at least 2",
                e.d
            )));
        }
        Ok(FiberData { entries })
    }

    /// Shorthand from `(d, b, a)` triples.
    pub fn from_triples(t: &[(u32, Rational, Rational)]) -> Result<Self> {
        FiberData::new(
            t.iter()
                .map(|(d, b, a)| FiberEntry::new(*d, b.clone(), a.clone()))
                .collect(),
        )
    }

    pub fn entries(&self) -> &[FiberEntry] {
        &self.entries
    }

    /// `Q = V^{1/2} = Π A_j^{d_j/2}`.
    pub fn v_half(&self) -> Poly {
        self.entries
            .iter()
            .fold(Poly::one(), |acc, e| &acc * &e.poly().pow(e.d / 2))
    }

    /// `Σ d_j/A_j`.
    pub fn sum_d_over_a(&self) -> RatFunc {
        self.entries.iter().fold(RatFunc::zero(), |acc, e| {
            &acc + &RatFunc::new(Poly::constant(int(e.d as i64)), e.poly())
        })
    }

    /// `Σ d_j Q/A_j`, a polynomial.
    pub fn sum_d_q_over_a(&self) -> Poly {
        let mut acc = Poly::zero();
        for (j, e) in self.entries.iter().enumerate() {
            let mut t = Poly::constant(int(e.d as i64)) * e.poly().pow(e.d / 2 - 1);
            for (k, f) in self.entries.iter().enumerate() {
                if k != j {
                    t = &t * &f.poly().pow(f.d / 2);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Drops entries with `b = 0`; returns the reduced data and `Σ d_j/a_j` over the dropped ones.
    fn fold_flat(&self) -> Result<(Option<FiberData>, Rational)> {
        let mut shift = Rational::zero();
        let mut kept = Vec::new();
        for e in &self.entries {
            if e.b.is_zero() {
                if !e.a.is_positive() {
                    return Err(Error::Precondition(format!(
                        "entry with b = 0 needs a > 0, got a = {}",
                        show(&e.a)
                    )));
                }
                shift += int(e.d as i64) / &e.a;
            } else {
                kept.push(e.clone());
            }
        }
        Ok((
            (!kept.is_empty()).then_some(FiberData { entries: kept }),
            shift,
        ))
    }

    fn collapsing_at(&self, x: &Rational) -> Vec<usize> {
        (0..self.entries.len())
            .filter(|&j| self.entries[j].eval(x).is_zero())
            .collect()
    }
}

impl fmt::Display for FiberData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("d={},b={},a={}", e.d, show(&e.b), show(&e.a)))
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Parses `"d=2,b=1/2,a=1;d=2,b=-1/2,a=1"`.
impl FromStr for FiberData {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (mut d, mut b, mut a) = (None, None, None);
            for kv in part.split(',') {
                let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse {
                    pos: 0,
                    msg: format!("expected key=value in `{kv}`"),
                })?;
                match k.trim() {
                    "d" => {
                        d = Some(v.trim().parse::<u32>().map_err(|e| Error::Parse {
                            pos: 0,
                            msg: format!("d: {e}"),
                        })?)
                    }
                    "b" => b = Some(parse_rat(v.trim())?),
                    "a" => a = Some(parse_rat(v.trim())?),
                    other => {
                        return Err(Error::Parse {
                            pos: 0,
                            msg: format!("unknown key `{other}`"),
                        })
                    }
                }
            }
            match (d, b, a) {
                (Some(d), Some(b), Some(a)) => entries.push(FiberEntry::new(d, b, a)),
                _ => {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: format!("entry `{part}` needs d, b and a"),
                    })
                }
            }
        }
        FiberData::new(entries)
    }
}

/// `h = P/Q` with `P'' = (Σ d_j/A_j − S)Q`, `P(0) = f`, `P'(0) = e`.
pub fn h_from_scalar(w: &FiberData, s: &Poly, e: &Rational, f: &Rational) -> RatFunc {
    let q = w.v_half();
    let rhs = &w.sum_d_q_over_a() - &(s * &q);
    RatFunc::new(rhs.double_antiderivative(e, f), q)
}

/// `S = Σ d_j/A_j − (hQ)''/Q`.
pub fn scalar_of_h(w: &FiberData, h: &RatFunc) -> RatFunc {
    let q = RatFunc::from_poly(w.v_half());
    let hq = h * &q;
    &w.sum_d_over_a() - &(&hq.nth_derivative(2) / &q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OrbitType {
    /// Only the circle fiber collapses.
    CircleCollapse,
    /// The circle collapses together with the listed entries; `complex_dim = Σ d_j / 2`.
    ProjectiveCollapse {
        entries: Vec<usize>,
        complex_dim: u32,
    },
}

fn orbit_type(w: &FiberData, x: &Rational) -> OrbitType {
    let c = w.collapsing_at(x);
    if c.is_empty() {
        OrbitType::CircleCollapse
    } else {
        let complex_dim = c.iter().map(|&j| w.entries[j].d / 2).sum();
        OrbitType::ProjectiveCollapse {
            entries: c,
            complex_dim,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalSolution {
    pub h: RatFunc,
    #[serde(with = "rat_string")]
    pub alpha: Rational,
    #[serde(with = "rat_string")]
    pub beta: Rational,
    #[serde(with = "crate::exactalg::rational::vec_rat_string")]
    pub interval: Vec<Rational>,
    pub smooth_left: bool,
    pub smooth_right: bool,
    pub positivity: SignCertificate,
    pub special_orbit_types: Vec<OrbitType>,
}

impl ExtremalSolution {
    /// `S = αx + β`.
    pub fn scalar(&self) -> Poly {
        Poly::linear(self.alpha.clone(), self.beta.clone())
    }
}

fn check_interval(x0: &Rational, x1: &Rational) -> Result<()> {
    if x0 >= x1 {
        return Err(Error::EmptyInterval(show(x0), show(x1)));
    }
    Ok(())
}

/// Every `A_j` is positive on the open interval and nonnegative at the ends.
fn check_fibers_positive(w: &FiberData, x0: &Rational, x1: &Rational) -> Result<()> {
    for (j, e) in w.entries.iter().enumerate() {
        let (l, r) = (e.eval(x0), e.eval(x1));
        if l.is_negative() || r.is_negative() || (l.is_zero() && r.is_zero()) {
            return Err(Error::Precondition(format!(
                "A_{} = {}x + {} is not positive on ({}, {})",
                j + 1,
                show(&e.b),
                show(&e.a),
                show(x0),
                show(x1)
            )));
        }
    }
    Ok(())
}

/// Solves for the extremal profile on `[x0, x1]` with `h = 0` at both ends, `h' = 2` on the
/// left and `h' = −2` on the right (entries vanishing at an end collapse there).
pub fn solve_compact_extremal(
    w: &FiberData,
    interval: (&Rational, &Rational),
) -> Result<ExtremalSolution> {
    let (x0, x1) = interval;
    check_interval(x0, x1)?;
    check_fibers_positive(w, x0, x1)?;
    let (reduced, shift) = w.fold_flat()?;
    let wr = match &reduced {
        Some(r) => r,
        // no entry couples to x: the base is an interval with h = 1 − x² up to scaling
        None => return solve_product(w, x0, x1, shift),
    };
    let q = wr.v_half();
    let base = wr.sum_d_q_over_a();
    let zero = Rational::zero();
    let (e, f) = if wr.collapsing_at(x0).is_empty() {
        (int(2) * q.eval(x0), zero.clone())
    } else {
        (zero.clone(), zero.clone())
    };
    let p0 = base.double_antiderivative_at(x0, &e, &f);
    let u = (&Poly::x() * &q).double_antiderivative_at(x0, &zero, &zero);
    let v = q.double_antiderivative_at(x0, &zero, &zero);
    // P = p0 − αu − βv; right end conditions are linear in (α, β)
    let (p0d, ud, vd) = (p0.derivative(), u.derivative(), v.derivative());
    let target = if wr.collapsing_at(x1).is_empty() {
        int(-2) * q.eval(x1)
    } else {
        zero.clone()
    };
    let m = vec![vec![u.eval(x1), v.eval(x1)], vec![ud.eval(x1), vd.eval(x1)]];
    let rhs = vec![p0.eval(x1), p0d.eval(x1) - target];
    let sol = solve(&m, &rhs)
        .ok_or_else(|| Error::Singular("boundary system for (α, β) is singular".into()))?;
    let (alpha, beta_red) = (sol[0].clone(), sol[1].clone());
    let p = &(&p0 - &u.scale(&alpha)) - &v.scale(&beta_red);
    let positivity = sturm_sign_certificate(&p, (x0, x1), (true, true))?;
    if !positivity.is_positive() {
        let msg = match &positivity {
            SignCertificate::Fails { witness } => format!("h < 0 at x = {}", show(witness)),
            _ => "h vanishes inside the interval".to_string(),
        };
        return Err(Error::Positivity(msg));
    }
    let h = RatFunc::new(p, q);
    let hd = h.derivative();
    Ok(ExtremalSolution {
        smooth_left: h.eval(x0) == Some(zero.clone()) && hd.eval(x0) == Some(int(2)),
        smooth_right: h.eval(x1) == Some(zero) && hd.eval(x1) == Some(int(-2)),
        h,
        alpha,
        beta: beta_red + shift,
        interval: vec![x0.clone(), x1.clone()],
        positivity,
        special_orbit_types: vec![orbit_type(w, x0), orbit_type(w, x1)],
    })
}

/// Product case: `h = 2(x − x0)(x1 − x)/(x1 − x0)`, constant scalar curvature.
fn solve_product(
    w: &FiberData,
    x0: &Rational,
    x1: &Rational,
    shift: Rational,
) -> Result<ExtremalSolution> {
    let len = x1 - x0;
    let s = int(2) / &len;
    let p = &Poly::linear(int(1), -x0.clone()) * &Poly::linear(int(-1), x1.clone());
    let p = p.scale(&s);
    let h = RatFunc::from_poly(p.clone());
    let positivity = sturm_sign_certificate(&p, (x0, x1), (true, true))?;
    Ok(ExtremalSolution {
        h,
        alpha: Rational::zero(),
        beta: int(4) / len + shift,
        interval: vec![x0.clone(), x1.clone()],
        smooth_left: true,
        smooth_right: true,
        positivity,
        special_orbit_types: vec![orbit_type(w, x0), orbit_type(w, x1)],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitConstraint {
    pub requirement: String,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Conditions on `h` itself, always required at a special orbit.
    pub h_conditions: Vec<String>,
    pub constraints: Vec<OrbitConstraint>,
    pub satisfied: bool,
}

/// Smoothness constraints on the collapsing entries at an endpoint. A single collapsing entry
/// needs `|b| = 2/(d+2)`; several need `Σ d_j/|b_j| = (k²−1)/2` with `k − 1 = Σ d_j`.
pub fn special_orbit_conditions(
    w: &FiberData,
    endpoint: &Rational,
    side: Side,
    collapsing: &[usize],
) -> Result<OrbitReport> {
    let sign = match side {
        Side::Left => int(1),
        Side::Right => int(-1),
    };
    for &j in collapsing {
        let e = w
            .entries
            .get(j)
            .ok_or_else(|| Error::InvalidInput(format!("no fiber entry {j}")))?;
        if !e.eval(endpoint).is_zero() {
            return Err(Error::Precondition(format!(
                "A_{} does not vanish at x = {}",
                j + 1,
                show(endpoint)
            )));
        }
    }
    let slope = if side == Side::Left { "2" } else { "-2" };
    let h_conditions = vec![
        format!("h({0}) = 0", show(endpoint)),
        format!("h'({}) = {slope}", show(endpoint)),
    ];
    let mut constraints = Vec::new();
    match collapsing {
        [] => {}
        [j] => {
            let e = &w.entries[*j];
            let need = &sign * int(2) / int(e.d as i64 + 2);
            constraints.push(OrbitConstraint {
                requirement: format!("b_{} = {}", j + 1, show(&need)),
                satisfied: e.b == need,
            });
        }
        many => {
            let k = many.iter().map(|&j| w.entries[j].d as i64).sum::<i64>() + 1;
            let target = Rational::new((k * k - 1).into(), 2.into());
            let lhs = many.iter().fold(Rational::zero(), |acc, &j| {
                let e = &w.entries[j];
                acc + int(e.d as i64) / (&sign * &e.b)
            });
            constraints.push(OrbitConstraint {
                requirement: format!("sum d_j/|b_j| = {}", show(&target)),
                satisfied: lhs == target,
            });
        }
    }
    let satisfied = constraints.iter().all(|c| c.satisfied);
    Ok(OrbitReport {
        h_conditions,
        constraints,
        satisfied,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EinsteinSolution {
    pub h: RatFunc,
    #[serde(with = "rat_string")]
    pub d: Rational,
    #[serde(with = "rat_string")]
    pub lambda: Rational,
    #[serde(with = "crate::exactalg::rational::vec_rat_string")]
    pub interval: Vec<Rational>,
    pub smooth_left: bool,
    pub smooth_right: bool,
}

/// Einstein profile `h = (2/Q) ∫_{x0}^x (D − λt) Q dt`.
///
/// `D = (1 − λa_j)/b_j` must agree across entries with `b_j ≠ 0`, and `λa_j = 1` when `b_j = 0`.
/// Without coupled entries `D` is fixed by `h(x1) = 0`.
pub fn einstein_h(
    w: &FiberData,
    lambda: &Rational,
    interval: (&Rational, &Rational),
) -> Result<EinsteinSolution> {
    let (x0, x1) = interval;
    check_interval(x0, x1)?;
    let mut d: Option<Rational> = None;
    for (j, e) in w.entries.iter().enumerate() {
        let r = int(1) - lambda * &e.a;
        if e.b.is_zero() {
            if !r.is_zero() {
                return Err(Error::Inconsistent(format!(
                    "entry {} has b = 0 but λ·a = {} ≠ 1",
                    j + 1,
                    show(&(lambda * &e.a))
                )));
            }
            continue;
        }
        let dj = r / &e.b;
        match &d {
            None => d = Some(dj),
            Some(prev) if *prev != dj => {
                return Err(Error::Inconsistent(format!(
                    "(1 − λa_j)/b_j differ: {} vs {}",
                    show(prev),
                    show(&dj)
                )))
            }
            _ => {}
        }
    }
    let q = w.v_half();
    let xq = &Poly::x() * &q;
    let d = match d {
        Some(d) => d,
        None => {
            let iq = q.integrate(x0, x1);
            lambda * xq.integrate(x0, x1) / iq
        }
    };
    let integrand = &q.scale(&d) - &xq.scale(lambda);
    let anti = integrand.antiderivative();
    let p = &anti - &Poly::constant(anti.eval(x0));
    let h = RatFunc::new(p.scale(&int(2)), q);
    let hd = h.derivative();
    Ok(EinsteinSolution {
        smooth_left: h.eval(x0) == Some(Rational::zero()) && hd.eval(x0) == Some(int(2)),
        smooth_right: h.eval(x1) == Some(Rational::zero()) && hd.eval(x1) == Some(int(-2)),
        h,
        d,
        lambda: lambda.clone(),
        interval: vec![x0.clone(), x1.clone()],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncompactSolution {
    pub h: RatFunc,
    #[serde(with = "rat_string")]
    pub beta: Rational,
    pub orbit_type: OrbitType,
    /// Every coefficient of `P = hQ` is nonnegative, so `h > 0` on `(0, ∞)`.
    pub coefficients_nonnegative: bool,
}

fn noncompact_precheck(w: &FiberData) -> Result<()> {
    let zero = Rational::zero();
    for (j, e) in w.entries.iter().enumerate() {
        if e.b.is_negative() {
            return Err(Error::Precondition(format!("b_{} < 0", j + 1)));
        }
        if e.a.is_negative() || (e.a.is_zero() && e.b.is_zero()) {
            return Err(Error::Precondition(format!(
                "A_{} is not positive on (0, ∞)",
                j + 1
            )));
        }
    }
    let collapsing = w.collapsing_at(&zero);
    if !collapsing.is_empty() {
        let r = special_orbit_conditions(w, &zero, Side::Left, &collapsing)?;
        if !r.satisfied {
            return Err(Error::Precondition(format!(
                "special orbit at x = 0 is not smooth: {}",
                r.constraints
                    .iter()
                    .map(|c| c.requirement.clone())
                    .collect::<Vec<_>>()
                    .join(", ")
            )));
        }
    }
    Ok(())
}

/// Constant scalar curvature `β ≤ 0` on `[0, ∞)`, smooth at `x = 0`.
pub fn noncompact_csc(w: &FiberData, beta: &Rational) -> Result<NoncompactSolution> {
    noncompact_precheck(w)?;
    let zero = Rational::zero();
    let q = w.v_half();
    let (e, f) = if w.collapsing_at(&zero).is_empty() {
        (int(2) * q.eval(&zero), zero.clone())
    } else {
        (zero.clone(), zero.clone())
    };
    let rhs = &w.sum_d_q_over_a() - &q.scale(beta);
    let p = rhs.double_antiderivative(&e, &f);
    if beta.is_positive() {
        return Err(Error::Rejected(format!(
            "β > 0: leading coefficient of P = hQ is {}, so P → −∞",
            show(&p.lead())
        )));
    }
    let nonneg = p.coeffs().iter().all(|c| !c.is_negative());
    if !nonneg {
        return Err(Error::Positivity(
            "P = hQ has a negative coefficient".into(),
        ));
    }
    Ok(NoncompactSolution {
        h: RatFunc::new(p, q),
        beta: beta.clone(),
        orbit_type: orbit_type(w, &zero),
        coefficients_nonnegative: nonneg,
    })
}

/// `∫ x Q dx` over the interval; vanishes when the metric can be Kähler–Einstein.
pub fn futaki_fiberwise(w: &FiberData, interval: (&Rational, &Rational)) -> Rational {
    (&Poly::x() * &w.v_half()).integrate(interval.0, interval.1)
}

/// Fiber entry of a parameter family: `A = b x + a(params)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyEntry {
    pub d: u32,
    pub b: Rational,
    /// Polynomial in the parameters.
    pub a: MPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusComponent {
    /// e.g. `"c = a"`, `"c = 1/a"` or `"a = 1/2"`.
    pub equation: String,
    pub feasible: bool,
    /// Parameter values at which feasibility was tested (`"a=…,c=…"`) and the outcome.
    pub samples: Vec<(String, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CscLocus {
    pub params: Vec<String>,
    /// `α` as a rational function of the parameters.
    pub alpha: String,
    pub alpha_identically_zero: bool,
    pub components: Vec<LocusComponent>,
    /// Factor of the numerator of `α` not resolved into components (`"1"` when fully resolved).
    pub residual: String,
    /// Summary: `"no CSC"` when no component is feasible.
    pub verdict: String,
}

/// Instantiates the family at given parameter values.
pub fn instantiate(family: &[FamilyEntry], params: &[Rational]) -> Result<FiberData> {
    FiberData::new(
        family
            .iter()
            .map(|e| FiberEntry::new(e.d, e.b.clone(), e.a.eval(params)))
            .collect(),
    )
}

/// `α(params)` of the compact extremal problem on `[x0, x1]` and its vanishing locus.
pub fn csc_locus(
    family: &[FamilyEntry],
    names: &[&str],
    interval: (&Rational, &Rational),
) -> Result<CscLocus> {
    let (x0, x1) = interval;
    check_interval(x0, x1)?;
    let np = names.len();
    if np == 0 || np > 2 {
        return Err(Error::Unsupported(format!(
            "csc_locus supports one or two parameters, got {np}"
        )));
    }
    if family.iter().any(|e| e.a.nvars() != np) {
        return Err(Error::InvalidInput(
            "family entries must be polynomials in the parameters".into(),
        ));
    }
    let flat_shift_free: Vec<&FamilyEntry> = family.iter().filter(|e| !e.b.is_zero()).collect();
    let (num, den) = alpha_family(&flat_shift_free, np, x0, x1)?;
    let (num, den) = cancel_univariate(num, den);
    let alpha = MultiRatFunc::new(num.clone(), den.clone());
    let alpha_str = alpha.to_string_with(names);
    if num.is_zero() {
        return Ok(CscLocus {
            params: names.iter().map(|s| s.to_string()).collect(),
            alpha: alpha_str,
            alpha_identically_zero: true,
            components: vec![],
            residual: "0".into(),
            verdict: "alpha vanishes identically".into(),
        });
    }
    let (roots, residual) = if np == 1 {
        locus_one(&num)?
    } else {
        locus_two(&num)?
    };
    let feasible_at = |p: &[Rational]| -> bool {
        let Ok(w) = instantiate(family, p) else {
            return false;
        };
        if w.entries
            .iter()
            .any(|e| !e.eval(x0).is_positive() || !e.eval(x1).is_positive())
        {
            return false;
        }
        matches!(solve_compact_extremal(&w, (x0, x1)), Ok(s) if s.smooth_left && s.smooth_right)
    };
    let mut components = Vec::new();
    for r in roots {
        match r {
            Root1(v) => {
                let ok = feasible_at(std::slice::from_ref(&v));
                components.push(LocusComponent {
                    equation: format!("{} = {}", names[0], show(&v)),
                    feasible: ok,
                    samples: vec![(format!("{}={}", names[0], show(&v)), ok)],
                });
            }
            Root2(rf) => {
                let mut samples = Vec::new();
                for a in [int(1) / int(3), int(1) / int(2), int(2), int(3), int(5)] {
                    if let Some(c) = rf.eval(&a) {
                        let ok = feasible_at(&[a.clone(), c.clone()]);
                        samples.push((
                            format!("{}={},{}={}", names[0], show(&a), names[1], show(&c)),
                            ok,
                        ));
                    }
                }
                components.push(LocusComponent {
                    equation: format!("{} = {}", names[1], ratfunc_in(&rf, names[0])),
                    feasible: samples.iter().any(|s| s.1),
                    samples,
                });
            }
        }
    }
    let verdict = if components.iter().any(|c| c.feasible) {
        "CSC locus found"
    } else {
        "no CSC"
    };
    Ok(CscLocus {
        params: names.iter().map(|s| s.to_string()).collect(),
        alpha: alpha_str,
        alpha_identically_zero: false,
        components,
        residual: residual.to_string_with(names),
        verdict: verdict.into(),
    })
}

enum LocusRoot {
    Root1(Rational),
    Root2(RatFunc),
}
use LocusRoot::{Root1, Root2};

fn ratfunc_in(r: &RatFunc, var: &str) -> String {
    let show = |p: &Poly| {
        let m = MPoly::from_poly(p, 1, 0);
        let s = m.to_string_with(&[var]);
        if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({s})")
        } else {
            s
        }
    };
    if r.den().degree() == Some(0) && r.den().lead().is_one() {
        MPoly::from_poly(r.num(), 1, 0).to_string_with(&[var])
    } else {
        format!("{}/{}", show(r.num()), show(r.den()))
    }
}

/// Numerator and denominator (polynomials in the parameters) of `α` by Cramer's rule.
fn alpha_family(
    family: &[&FamilyEntry],
    np: usize,
    x0: &Rational,
    x1: &Rational,
) -> Result<(MPoly, MPoly)> {
    let nv = np + 1;
    let lift = |p: &MPoly| p.embed(nv, &(1..=np).collect::<Vec<_>>());
    let x = MPoly::var(nv, 0);
    let entries: Vec<(u32, MPoly)> = family
        .iter()
        .map(|e| (e.d, &x.scale(&e.b) + &lift(&e.a)))
        .collect();
    let mut q = MPoly::one(nv);
    for (d, a) in &entries {
        q = &q * &a.pow(d / 2);
    }
    let mut sdq = MPoly::zero(nv);
    for (j, (d, a)) in entries.iter().enumerate() {
        let mut t = a.pow(d / 2 - 1).scale(&int(*d as i64));
        for (k, (dk, ak)) in entries.iter().enumerate() {
            if k != j {
                t = &t * &ak.pow(dk / 2);
            }
        }
        sdq = &sdq + &t;
    }
    let collapse = |pt: &Rational| entries.iter().any(|(_, a)| a.substitute(0, pt).is_zero());
    let integ = |p: &MPoly| {
        let f = p.integrate(0);
        &f - &f.substitute(0, x0)
    };
    let da = |p: &MPoly| integ(&integ(p));
    let xm = &x - &MPoly::constant(nv, x0.clone());
    let e = if collapse(x0) {
        MPoly::zero(nv)
    } else {
        q.substitute(0, x0).scale(&int(2))
    };
    let p0 = &da(&sdq) + &(&e * &xm);
    let u = da(&(&x * &q));
    let v = da(&q);
    let at = |p: &MPoly| p.substitute(0, x1);
    let dat = |p: &MPoly| p.derivative(0).substitute(0, x1);
    let target = if collapse(x1) {
        MPoly::zero(nv)
    } else {
        at(&q).scale(&int(-2))
    };
    let (a11, a12, a21, a22) = (at(&u), at(&v), dat(&u), dat(&v));
    let (r1, r2) = (at(&p0), &dat(&p0) - &target);
    let det = &(&a11 * &a22) - &(&a12 * &a21);
    let num = &(&r1 * &a22) - &(&a12 * &r2);
    let back = |p: &MPoly| drop_x(p, np);
    let (num, det) = (back(&num), back(&det));
    if det.is_zero() {
        return Err(Error::Singular(
            "boundary system is singular for all parameters".into(),
        ));
    }
    Ok((num, det))
}

/// Rewrites a polynomial in `(x, p_1..p_np)` with no `x` dependence into `(p_1..p_np)`.
fn drop_x(p: &MPoly, np: usize) -> MPoly {
    let mut out = MPoly::zero(np);
    for (e, c) in p.terms() {
        debug_assert_eq!(e[0], 0);
        out.insert_add(e[1..].to_vec(), c.clone());
    }
    out
}

fn rational_roots(p: &Poly) -> Result<Vec<Rational>> {
    Ok(isolate_real_roots(p)?
        .into_iter()
        .filter(|r| r.is_exact())
        .map(|r| r.lo)
        .collect())
}

fn locus_one(num: &MPoly) -> Result<(Vec<LocusRoot>, MPoly)> {
    let p = num.to_poly(0).expect("univariate");
    let roots = rational_roots(&p)?;
    let mut rest = p.clone();
    for r in &roots {
        loop {
            let (qt, rem) = rest.div_rem(&Poly::linear(int(1), -r.clone()));
            if !rem.is_zero() {
                break;
            }
            rest = qt;
        }
    }
    Ok((
        roots.into_iter().map(Root1).collect(),
        MPoly::from_poly(&rest.monic(), 1, 0),
    ))
}

/// Univariate polynomial in the first parameter as a `Poly`.
fn as_poly_a(p: &MPoly) -> Poly {
    p.to_poly(0).expect("polynomial in the first parameter")
}

/// Components `c = κ v(a)/u(a)` of `N(a, c) = 0`, found among linear factors of the leading
/// and trailing coefficients in `c`, then verified by exact substitution.
fn locus_two(num: &MPoly) -> Result<(Vec<LocusRoot>, MPoly)> {
    let coeffs: Vec<Poly> = num.coefficients_in(1).iter().map(as_poly_a).collect();
    let mut cur: Vec<RatFunc> = coeffs.iter().cloned().map(RatFunc::from_poly).collect();
    let lc = coeffs.last().cloned().unwrap_or_else(Poly::zero);
    let tc_idx = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let mut found: Vec<RatFunc> = Vec::new();
    if tc_idx > 0 {
        found.push(RatFunc::zero());
        cur.drain(..tc_idx);
    }
    let tc = coeffs[tc_idx].clone();
    let factors = |p: &Poly| -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        let mut rest = p.clone();
        for r in rational_roots(p)? {
            loop {
                let lin = Poly::linear(int(1), -r.clone());
                let (qt, rem) = rest.div_rem(&lin);
                if !rem.is_zero() {
                    break;
                }
                out.push(lin);
                rest = qt;
            }
        }
        Ok(out)
    };
    let subsets = |f: &[Poly]| -> Vec<Poly> {
        let mut out: Vec<Poly> = vec![Poly::one()];
        for mask in 1u32..(1 << f.len().min(12)) {
            let p = (0..f.len())
                .filter(|i| mask & (1 << i) != 0)
                .fold(Poly::one(), |acc, i| &acc * &f[i]);
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    };
    let us = subsets(&factors(&lc)?);
    let vs = subsets(&factors(&tc)?);
    // specialize a at a point where lc and tc do not vanish
    let a_star = (2..50)
        .map(|k| Rational::new(k.into(), 7.into()))
        .find(|a| !lc.eval(a).is_zero() && !tc.eval(a).is_zero())
        .ok_or_else(|| Error::NotFound("no specialization point".into()))?;
    loop {
        if cur.len() <= 1 {
            break;
        }
        let spec: Vec<Rational> = cur
            .iter()
            .map(|c| c.eval(&a_star).expect("finite"))
            .collect();
        let spec_roots = rational_roots(&Poly::new(spec))?;
        let mut hit = None;
        'search: for u in &us {
            for v in &vs {
                let base = RatFunc::new(v.clone(), u.clone());
                let Some(bv) = base.eval(&a_star) else {
                    continue;
                };
                if bv.is_zero() {
                    continue;
                }
                for r in &spec_roots {
                    let kappa = r / &bv;
                    let cand = base.scale(&kappa);
                    if let Some(next) = divide_root(&cur, &cand) {
                        hit = Some((cand, next));
                        break 'search;
                    }
                }
            }
        }
        match hit {
            Some((cand, next)) => {
                if !found.contains(&cand) {
                    found.push(cand);
                }
                cur = next;
            }
            None => break,
        }
    }
    // residual numerator: clear denominators of the remaining quotient
    let l = cur.iter().fold(Poly::one(), |acc, c| {
        let g = Poly::gcd(&acc, c.den());
        (&acc * c.den()).div_rem(&g).0
    });
    let mut residual = MPoly::zero(2);
    for (k, c) in cur.iter().enumerate() {
        let p = (c * &RatFunc::from_poly(l.clone())).num().clone();
        let lifted = MPoly::from_poly(&p, 2, 0);
        residual = &residual + &(&lifted * &MPoly::var(2, 1).pow(k as u32));
    }
    // the factor (u c − v) of a root c = v/u carries u, which the monic division left behind
    for root in &found {
        let u = root.den();
        if let Some(cont) = content_in(&residual, 0) {
            if u.degree().unwrap_or(0) > 0 && cont.div_rem(u).1.is_zero() {
                residual = divide_in(&residual, u, 0);
            }
        }
    }
    let content = residual.content();
    if !content.is_zero() {
        residual = residual.scale(&(Rational::one() / content));
    }
    Ok((found.into_iter().map(Root2).collect(), residual))
}

/// Synthetic division of `Σ cur[k] c^k` by `c − root` over `Q(a)`; `None` if not a root.
fn divide_root(cur: &[RatFunc], root: &RatFunc) -> Option<Vec<RatFunc>> {
    let n = cur.len();
    let mut out = vec![RatFunc::zero(); n - 1];
    let mut carry = RatFunc::zero();
    for k in (1..n).rev() {
        carry = &cur[k] + &(&carry * root);
        out[k - 1] = carry.clone();
    }
    let rem = &cur[0] + &(&carry * root);
    rem.is_zero().then_some(out)
}

/// Groups `p` by its monomials in the variables other than `k`; values are coefficient lists in `x_k`.
fn group_in(p: &MPoly, k: usize) -> std::collections::BTreeMap<Vec<u32>, Poly> {
    let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<Rational>> = Default::default();
    for (e, c) in p.terms() {
        let mut key = e.clone();
        let d = key[k] as usize;
        key[k] = 0;
        let v = groups.entry(key).or_default();
        if v.len() <= d {
            v.resize(d + 1, Rational::zero());
        }
        v[d] = c.clone();
    }
    groups
        .into_iter()
        .map(|(key, c)| (key, Poly::new(c)))
        .collect()
}

/// Gcd, as a polynomial in `x_k`, of the coefficients of `p` in the other variables.
fn content_in(p: &MPoly, k: usize) -> Option<Poly> {
    let g = group_in(p, k)
        .values()
        .fold(Poly::zero(), |g, c| Poly::gcd(&g, c));
    (!g.is_zero()).then_some(g)
}

/// Divides `p` by a polynomial in `x_k` that divides every coefficient.
fn divide_in(p: &MPoly, g: &Poly, k: usize) -> MPoly {
    let mut out = MPoly::zero(p.nvars());
    for (key, c) in group_in(p, k) {
        for (d, v) in c.div_rem(g).0.coeffs().iter().enumerate() {
            let mut e = key.clone();
            e[k] = d as u32;
            out.insert_add(e, v.clone());
        }
    }
    out
}

/// Cancels common factors of `num` and `den` that involve a single parameter.
fn cancel_univariate(mut num: MPoly, mut den: MPoly) -> (MPoly, MPoly) {
    for k in 0..num.nvars() {
        let (Some(gn), Some(gd)) = (content_in(&num, k), content_in(&den, k)) else {
            continue;
        };
        let g = Poly::gcd(&gn, &gd);
        if g.degree().unwrap_or(0) > 0 {
            num = divide_in(&num, &g, k);
            den = divide_in(&den, &g, k);
        }
    }
    (num, den)
}

fn show(r: &Rational) -> String {
    r.to_string()
}
