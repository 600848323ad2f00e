//! Hermitian (generally non-Kähler) cohomogeneity-one metrics
//! `g = dx²/h + h θ² + Σ A_j g_j` with fiber functions `A_j` of degree at most two.
//!
//! When `Σ d_j μ_j = 0` the scalar curvature equation integrates exactly as in the Kähler case:
//! `h = Q⁻¹ ∬ (Σ d_j/A_j − S) Q` with `Q = Π A_j^{d_j/2}`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::rational::{int, parse_rat, rat, rat_string, to_f64};
use crate::exactalg::sturm::{sturm_sign_certificate, SignCertificate};
use crate::exactalg::{Poly, RatFunc, Rational};

/// `μ = 2A''/A − (A'/A)² + b²/A²`.
pub fn mu_invariant(a: &Poly, b: &Rational) -> RatFunc {
    let af = RatFunc::from_poly(a.clone());
    let a1 = RatFunc::from_poly(a.derivative());
    let a2 = RatFunc::from_poly(a.nth_derivative(2));
    let r1 = &a1 / &af;
    &(&(&a2 / &af).scale(&int(2)) - &(&r1 * &r1)) + &RatFunc::constant(b * b).div_poly(&(a * a))
}

trait DivPoly {
    fn div_poly(&self, p: &Poly) -> RatFunc;
}

impl DivPoly for RatFunc {
    fn div_poly(&self, p: &Poly) -> RatFunc {
        self / &RatFunc::from_poly(p.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub d: u32,
    /// `A_j`, lowest coefficient first.
    pub a: Poly,
    #[serde(with = "rat_string")]
    pub b: Rational,
}

impl ProfileEntry {
    /// Linear entry `A = b x + a`.
    pub fn linear(d: u32, b: Rational, a: Rational) -> Self {
        ProfileEntry {
            d,
            a: Poly::linear(b.clone(), a),
            b,
        }
    }

    /// Quadratic entry `A = e x² + l x + t` with twist `b`.
    pub fn quadratic(d: u32, e: Rational, l: Rational, t: Rational, b: Rational) -> Self {
        ProfileEntry {
            d,
            a: Poly::new(vec![t, l, e]),
            b,
        }
    }

    /// `A = e(x + c)² − b²/(4e)`, the quadratic solution of `μ = 0`.
    pub fn shifted_quadratic(d: u32, e: Rational, c: Rational, b: Rational) -> Self {
        let t = &e * &c * &c - &b * &b / (int(4) * &e);
        let l = int(2) * &e * &c;
        ProfileEntry::quadratic(d, e, l, t, b)
    }

    pub fn mu(&self) -> RatFunc {
        mu_invariant(&self.a, &self.b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProfileEntry>", into = "Vec<ProfileEntry>")]
pub struct FiberProfile {
    entries: Vec<ProfileEntry>,
}

impl TryFrom<Vec<ProfileEntry>> for FiberProfile {
    type Error = Error;
    fn try_from(v: Vec<ProfileEntry>) -> Result<Self> {
        FiberProfile::new(v)
    }
}

impl From<FiberProfile> for Vec<ProfileEntry> {
    fn from(p: FiberProfile) -> Self {
        p.entries
    }
}

impl FiberProfile {
    pub fn new(entries: Vec<ProfileEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput(
                "profile needs at least one entry".into(),
            ));
        }
        for (j, e) in entries.iter().enumerate() {
            if e.d < 2 || e.d % 2 != 0 {
                return Err(Error::InvalidInput(format!(
                    "entry {}: d = {} must be even and at least 2",
                    j + 1,
                    e.d
                )));
            }
            match e.a.degree() {
                None => return Err(Error::InvalidInput(format!("entry {}: A is zero", j + 1))),
                Some(k) if k > 2 => {
                    return Err(Error::InvalidInput(format!(
                        "entry {}: A has degree {k} > 2",
                        j + 1
                    )))
                }
                _ => {}
            }
        }
        Ok(FiberProfile { entries })
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    pub fn is_kahler(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.a.degree().unwrap_or(0) <= 1 && e.a.coeff(1) == e.b)
    }

    /// `Q = Π A_j^{d_j/2}`.
    pub fn v_half(&self) -> Poly {
        self.entries
            .iter()
            .fold(Poly::one(), |acc, e| &acc * &e.a.pow(e.d / 2))
    }

    /// `Σ d_j Q/A_j`, a polynomial.
    pub fn sum_d_q_over_a(&self) -> Poly {
        let mut acc = Poly::zero();
        for (j, e) in self.entries.iter().enumerate() {
            let mut t = e.a.pow(e.d / 2 - 1).scale(&int(e.d as i64));
            for (k, f) in self.entries.iter().enumerate() {
                if k != j {
                    t = &t * &f.a.pow(f.d / 2);
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    pub fn sum_d_over_a(&self) -> RatFunc {
        self.entries.iter().fold(RatFunc::zero(), |acc, e| {
            &acc + &RatFunc::new(Poly::constant(int(e.d as i64)), e.a.clone())
        })
    }

    /// `Σ d_j μ_j`.
    pub fn sum_d_mu(&self) -> RatFunc {
        self.entries.iter().fold(RatFunc::zero(), |acc, e| {
            &acc + &e.mu().scale(&int(e.d as i64))
        })
    }

    /// Fails with the offending function unless `Σ d_j μ_j ≡ 0`.
    pub fn check_ricci_invariant(&self) -> Result<()> {
        let s = self.sum_d_mu();
        if s.is_zero() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "sum d_j mu_j = {s} is not identically zero"
            )))
        }
    }

    /// Index of the first entry not strictly positive on `[x0, x1]`.
    fn first_nonpositive(&self, x0: &Rational, x1: &Rational) -> Option<usize> {
        self.entries.iter().position(|e| {
            !e.a.eval(x0).is_positive()
                || !e.a.eval(x1).is_positive()
                || !matches!(
                    sturm_sign_certificate(&e.a, (x0, x1), (false, false)),
                    Ok(SignCertificate::Positive)
                )
        })
    }
}

impl fmt::Display for FiberProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| {
                if e.a.degree().unwrap_or(0) <= 1 && e.a.coeff(1) == e.b {
                    format!("d={},lin({},{})", e.d, e.b, e.a.coeff(0))
                } else {
                    format!(
                        "d={},quad({},{},{}),b={}",
                        e.d,
                        e.a.coeff(2),
                        e.a.coeff(1),
                        e.a.coeff(0),
                        e.b
                    )
                }
            })
            .collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Grammar: entries separated by `;`, each `d=2,lin(b,a)` or `d=2,quad(e,l,t),b=…`.
impl FromStr for FiberProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { pos: 0, msg };
        let mut entries = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (mut d, mut b, mut shape) = (None, None, None);
            let mut rest = part;
            while !rest.is_empty() {
                let (item, tail) = split_item(rest);
                rest = tail;
                let item = item.trim();
                if let Some(v) = item.strip_prefix("d=") {
                    d = Some(
                        v.trim()
                            .parse::<u32>()
                            .map_err(|_| bad(format!("bad d in `{part}`")))?,
                    );
                } else if let Some(v) = item.strip_prefix("b=") {
                    b = Some(parse_rat(v)?);
                } else if let Some(args) = call_args(item, "lin") {
                    shape = Some(("lin", args));
                } else if let Some(args) = call_args(item, "quad") {
                    shape = Some(("quad", args));
                } else {
                    return Err(bad(format!("unexpected `{item}` in `{part}`")));
                }
            }
            let d = d.ok_or_else(|| bad(format!("entry `{part}` needs d")))?;
            let entry = match shape {
                Some(("lin", args)) if args.len() == 2 => {
                    if b.is_some() {
                        return Err(bad(format!("lin(b,a) carries its own b in `{part}`")));
                    }
                    ProfileEntry::linear(d, args[0].clone(), args[1].clone())
                }
                Some(("quad", args)) if args.len() == 3 => {
                    let b = b.ok_or_else(|| bad(format!("quadratic entry `{part}` needs b")))?;
                    ProfileEntry::quadratic(d, args[0].clone(), args[1].clone(), args[2].clone(), b)
                }
                _ => return Err(bad(format!("entry `{part}` needs lin(b,a) or quad(e,l,t)"))),
            };
            entries.push(entry);
        }
        FiberProfile::new(entries)
    }
}

/// Splits off the next comma-separated item, keeping parenthesised commas.
fn split_item(s: &str) -> (&str, &str) {
    let mut depth = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return (&s[..i], &s[i + 1..]),
            _ => {}
        }
    }
    (s, "")
}

fn call_args(item: &str, name: &str) -> Option<Vec<Rational>> {
    let inner = item
        .strip_prefix(name)?
        .trim()
        .strip_prefix('(')?
        .strip_suffix(')')?;
    inner
        .split(',')
        .map(parse_rat)
        .collect::<Result<Vec<_>>>()
        .ok()
}

/// Where the `Σ d_j/A_j` term comes from.
#[derive(Clone, Debug)]
pub enum ScalarSource<'a> {
    /// `Σ d_j/A_j` of the profile.
    Profile,
    /// Caller-supplied `S*`; `S*·Q` must be a polynomial.
    Explicit(&'a RatFunc),
}

/// `h = P/Q` with `P'' = (S* − S) Q`, `P(0) = f`, `P'(0) = e`, gated by `Σ d_j μ_j = 0`.
pub fn general_h_integration(
    profile: &FiberProfile,
    source: ScalarSource<'_>,
    s: &Rational,
    e: &Rational,
    f: &Rational,
) -> Result<RatFunc> {
    profile.check_ricci_invariant()?;
    let q = profile.v_half();
    let star_q = match source {
        ScalarSource::Profile => {
            if let Some(j) = profile.entries.iter().position(|e| !e.mu().is_zero()) {
                return Err(Error::Unsupported(format!(
                    "entry {} has nonzero mu; supply S* explicitly for such profiles",
                    j + 1
                )));
            }
            profile.sum_d_q_over_a()
        }
        ScalarSource::Explicit(star) => {
            let r = star * &RatFunc::from_poly(q.clone());
            if r.den().degree() != Some(0) {
                return Err(Error::Unsupported("S*·Q is not a polynomial".into()));
            }
            r.num().scale(&(Rational::one() / r.den().lead()))
        }
    };
    let rhs = &star_q - &q.scale(s);
    Ok(RatFunc::new(rhs.double_antiderivative(e, f), q))
}

/// Scalar curvature of the Hermitian metric with profile `h`, valid for any `A_j`:
/// `S = −h'' − h'Σd_jA_j'/A_j + h[−Σd_jA_j''/A_j + ¾Σd_j(A_j'/A_j)² − ¼(Σd_jA_j'/A_j)² − ¼Σd_jb_j²/A_j²] + Σd_j/A_j`.
pub fn hermitian_scalar(profile: &FiberProfile, h: &RatFunc) -> RatFunc {
    let mut lin = RatFunc::zero();
    let mut bracket = RatFunc::zero();
    for e in &profile.entries {
        let d = int(e.d as i64);
        let a = RatFunc::from_poly(e.a.clone());
        let r1 = &RatFunc::from_poly(e.a.derivative()) / &a;
        let r2 = &RatFunc::from_poly(e.a.nth_derivative(2)) / &a;
        lin = &lin + &r1.scale(&d);
        bracket = &bracket - &r2.scale(&d);
        bracket = &bracket + &(&r1 * &r1).scale(&(&d * rat(3, 4)));
        bracket = &bracket - &RatFunc::constant(&e.b * &e.b * &d / int(4)).div_poly(&(&e.a * &e.a));
    }
    bracket = &bracket - &(&lin * &lin).scale(&rat(1, 4));
    let h1 = h.derivative();
    let h2 = h1.derivative();
    &(&(&(-&h2) - &(&h1 * &lin)) + &(h * &bracket)) + &profile.sum_d_over_a()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HermitianFamilyMember {
    pub q: i64,
    #[serde(with = "rat_string")]
    pub l: Rational,
    #[serde(with = "rat_string")]
    pub b: Rational,
    pub h: RatFunc,
    pub a1: Poly,
    #[serde(with = "rat_string")]
    pub scalar: Rational,
    pub valid: bool,
    /// Inequalities from `A_1 > 0` on `[−1, 1]` that fail.
    pub violated: Vec<String>,
}

/// The constant scalar curvature family on the Hirzebruch surface with twist `q`:
/// `b = −q/2`, `A_1 = ½((l+b)x+1)((l−b)x+1)`, `S = 6`.
pub fn hirzebruch_hermitian_family(q: i64, l: &Rational) -> HermitianFamilyMember {
    let b = rat(-q, 2);
    let u = Poly::linear(l + &b, int(1));
    let v = Poly::linear(l - &b, int(1));
    let a1 = (&u * &v).scale(&rat(1, 2));
    let k = l * l - &b * &b;
    let num = &Poly::from_ints(&[1, 0, -1]) * &Poly::new(vec![int(2) + &k, int(4) * l, k.clone()]);
    let h = RatFunc::new(num, (&u * &v).scale(&int(2)));
    let mut violated = Vec::new();
    if (l + &b).abs() >= int(1) {
        violated.push("|l + b| < 1".to_string());
    }
    if (l - &b).abs() >= int(1) {
        violated.push("|l - b| < 1".to_string());
    }
    HermitianFamilyMember {
        q,
        l: l.clone(),
        b,
        h,
        a1,
        scalar: int(6),
        valid: violated.is_empty(),
        violated,
    }
}

/// The compact problem on `[0, 1]`: linear entries `A_i = b_i(x + c)` sharing `c`, and one
/// quadratic entry `A_m = e(x + c_m)² − b_m²/(4e)` whose centre `c_m` is the free parameter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactTemplate {
    pub linear: Vec<LinearFactor>,
    pub quad_d: u32,
    #[serde(with = "rat_string")]
    pub quad_e: Rational,
    #[serde(with = "rat_string")]
    pub quad_b: Rational,
    #[serde(with = "rat_string")]
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearFactor {
    pub d: u32,
    #[serde(with = "rat_string")]
    pub b: Rational,
}

impl CompactTemplate {
    /// Two entries of real dimension two: `A_1 = x + c` and `A_2 = e(x + c_m)² − 1/(4e)`, both with `b = 1`.
    pub fn two_entry(c: Rational, e: Rational) -> Self {
        CompactTemplate {
            linear: vec![LinearFactor { d: 2, b: int(1) }],
            quad_d: 2,
            quad_e: e,
            quad_b: int(1),
            c,
        }
    }

    pub fn profile(&self, cm: &Rational) -> Result<FiberProfile> {
        if !self.quad_e.is_positive() {
            return Err(Error::InvalidInput(format!(
                "quadratic coefficient e = {} must be positive",
                self.quad_e
            )));
        }
        let mut entries: Vec<ProfileEntry> = self
            .linear
            .iter()
            .map(|f| ProfileEntry::linear(f.d, f.b.clone(), &f.b * &self.c))
            .collect();
        entries.push(ProfileEntry::shifted_quadratic(
            self.quad_d,
            self.quad_e.clone(),
            cm.clone(),
            self.quad_b.clone(),
        ));
        FiberProfile::new(entries)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactHermitianSolution {
    #[serde(with = "rat_string")]
    pub c: Rational,
    #[serde(with = "rat_string")]
    pub c_m: Rational,
    #[serde(with = "rat_string")]
    pub beta: Rational,
    pub h: RatFunc,
    /// `(x, h(x))` on an even grid of `[0, 1]`.
    pub samples: Vec<(f64, f64)>,
    /// `h'(1) + 2` at the returned parameter.
    pub boundary_residual: f64,
    /// `h(0) = 0`, `h'(0) = 2` and `h(1) = 0` hold exactly.
    pub exact_boundary: bool,
    pub positivity: SignCertificate,
}

struct CompactEval {
    beta: Rational,
    h: RatFunc,
    g: Rational,
}

/// `β` from `h(1) = 0`, then `g = h'(1) + 2`, with `h(0) = 0` and `h'(0) = 2` built in.
fn compact_eval(t: &CompactTemplate, cm: &Rational) -> Option<CompactEval> {
    let (zero, one) = (Rational::zero(), Rational::one());
    let p = t.profile(cm).ok()?;
    if p.first_nonpositive(&zero, &one).is_some() || p.check_ricci_invariant().is_err() {
        return None;
    }
    let q = p.v_half();
    let e = int(2) * q.eval(&zero);
    let p0 = p.sum_d_q_over_a().double_antiderivative(&e, &zero);
    let u = q.double_antiderivative(&zero, &zero);
    let u1 = u.eval(&one);
    if u1.is_zero() {
        return None;
    }
    let beta = p0.eval(&one) / &u1;
    let pp = &p0 - &u.scale(&beta);
    let q1 = q.eval(&one);
    let g = pp.derivative().eval(&one) / &q1 + int(2);
    Some(CompactEval {
        beta,
        h: RatFunc::new(pp, q),
        g,
    })
}

/// Rational close to `x` with a power-of-two denominator.
fn dyadic(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Brackets a root of `h'(1) + 2` in the centre `c_m` over `scan`, then bisects to `|g| < 10⁻¹²`.
pub fn solve_compact_hermitian(
    t: &CompactTemplate,
    scan: (&Rational, &Rational),
    steps: usize,
) -> Result<CompactHermitianSolution> {
    let (lo, hi) = scan;
    if lo >= hi || steps < 2 {
        return Err(Error::EmptyInterval(lo.to_string(), hi.to_string()));
    }
    t.profile(lo)?.check_ricci_invariant()?;
    let grid: Vec<Rational> = (0..=steps)
        .map(|k| lo + (hi - lo) * Rational::new(k.into(), steps.into()))
        .collect();
    let vals: Vec<Option<Rational>> = grid
        .iter()
        .map(|cm| compact_eval(t, cm).map(|ev| ev.g))
        .collect();
    let bracket = (0..steps).find_map(|k| match (&vals[k], &vals[k + 1]) {
        (Some(a), Some(b)) if a.signum() != b.signum() || a.is_zero() => {
            Some((grid[k].clone(), grid[k + 1].clone()))
        }
        _ => None,
    });
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::NotFound(format!(
            "h'(1) + 2 does not change sign for c_m in [{lo}, {hi}]"
        ))
    })?;
    let ga = compact_eval(t, &a).expect("bracket end is admissible").g;
    let mut best = compact_eval(t, &a).expect("bracket end is admissible");
    let mut cm = a.clone();
    for _ in 0..200 {
        if to_f64(&best.g).abs() < 1e-12 {
            break;
        }
        let m = dyadic((to_f64(&a) + to_f64(&b)) / 2.0);
        let m = if m <= a || m >= b {
            (&a + &b) / int(2)
        } else {
            m
        };
        let Some(ev) = compact_eval(t, &m) else {
            return Err(Error::NotFound(
                "inadmissible parameter inside the bracket".into(),
            ));
        };
        if ev.g.signum() == ga.signum() {
            a = m.clone();
        } else {
            b = m.clone();
        }
        cm = m;
        best = ev;
    }
    let positivity = sturm_sign_certificate(
        best.h.num(),
        (&Rational::zero(), &Rational::one()),
        (true, true),
    )?;
    let (zero, one) = (Rational::zero(), Rational::one());
    let dh = best.h.derivative();
    let exact_boundary = best.h.eval(&zero) == Some(zero.clone())
        && dh.eval(&zero) == Some(int(2))
        && best.h.eval(&one) == Some(zero.clone());
    let samples = (0..=50)
        .map(|k| {
            let x = k as f64 / 50.0;
            (x, best.h.eval_f64(x))
        })
        .collect();
    Ok(CompactHermitianSolution {
        c: t.c.clone(),
        c_m: cm,
        beta: best.beta,
        boundary_residual: to_f64(&best.g),
        exact_boundary,
        h: best.h,
        samples,
        positivity,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncompactHermitianSolution {
    pub h: RatFunc,
    #[serde(with = "rat_string")]
    pub beta: Rational,
    /// The first entry vanishes at `x = 0`: the end is a `ℂ^{(d₁+2)/2}` fiber.
    pub collapsed: bool,
    pub coefficients_nonnegative: bool,
}

/// Constant scalar curvature `β ≤ 0` on `[0, ∞)`, smooth at `x = 0`.
pub fn noncompact_hermitian(
    profile: &FiberProfile,
    beta: &Rational,
) -> Result<NoncompactHermitianSolution> {
    profile.check_ricci_invariant()?;
    let zero = Rational::zero();
    let mut collapsed = false;
    for (j, e) in profile.entries.iter().enumerate() {
        let c = e.a.coeffs();
        let get = |k: usize| c.get(k).cloned().unwrap_or_else(Rational::zero);
        if c.iter().any(|v| v.is_negative()) {
            return Err(Error::Precondition(format!(
                "entry {}: A has a negative coefficient",
                j + 1
            )));
        }
        if get(0).is_zero() {
            let need = int(2) / int(e.d as i64 + 2);
            if j != 0 || get(1) != need || e.b != need {
                return Err(Error::Precondition(format!(
                    "entry {}: A(0) = 0 requires it to be the first entry with A'(0) = b = {need}",
                    j + 1
                )));
            }
            collapsed = true;
        } else if e.a.degree() == Some(2) && (get(1).is_zero() || get(2).is_zero()) {
            return Err(Error::Precondition(format!(
                "entry {}: quadratic A needs e, l, t > 0",
                j + 1
            )));
        }
    }
    let q = profile.v_half();
    let e = if collapsed {
        zero.clone()
    } else {
        int(2) * q.eval(&zero)
    };
    let p = (&profile.sum_d_q_over_a() - &q.scale(beta)).double_antiderivative(&e, &zero);
    if beta.is_positive() {
        return Err(Error::Rejected(format!(
            "β > 0: leading coefficient of P = hQ is {}, so P → −∞",
            p.lead()
        )));
    }
    let nonneg = p.coeffs().iter().all(|c| !c.is_negative());
    if !nonneg {
        return Err(Error::Positivity(
            "P = hQ has a negative coefficient".into(),
        ));
    }
    Ok(NoncompactHermitianSolution {
        h: RatFunc::new(p, q),
        beta: beta.clone(),
        collapsed,
        coefficients_nonnegative: nonneg,
    })
}
