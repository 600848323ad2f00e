//! Matrix Lie algebras over the Gaussian rationals, isotropy decompositions of the catalog
//! orbits and the span tests deciding when `r(X, ∂_t) = 0` forces an Einstein metric diagonal.

use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::linalg::rank;
use crate::exactalg::{int, rat, Rational};

pub type Gaussian = Complex<Rational>;

/// An `n × n` matrix with Gaussian-rational entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgElement {
    n: usize,
    entries: Vec<Gaussian>,
}

fn gz() -> Gaussian {
    Complex::new(Rational::zero(), Rational::zero())
}

fn show_gaussian(z: &Gaussian) -> String {
    let (re, im) = (&z.re, &z.im);
    let imag = |v: &Rational| match v {
        v if v.is_one() => "i".to_string(),
        v if *v == -Rational::one() => "-i".to_string(),
        v => format!("{v}i"),
    };
    match (re.is_zero(), im.is_zero()) {
        (_, true) => re.to_string(),
        (true, false) => imag(im),
        (false, false) if *im > Rational::zero() => format!("{re}+{}", imag(im)),
        _ => format!("{re}{}", imag(im)),
    }
}

impl AlgElement {
    pub fn zero(n: usize) -> Self {
        AlgElement {
            n,
            entries: vec![gz(); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Gaussian) -> Self {
        AlgElement {
            n,
            entries: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    /// `E_ij = e_ij − e_ji` with 1-based indices.
    pub fn e(n: usize, i: usize, j: usize) -> Self {
        Self::zero(n)
            .with(i - 1, j - 1, Complex::new(int(1), int(0)))
            .with(j - 1, i - 1, Complex::new(int(-1), int(0)))
    }

    /// `i(e_ij + e_ji)` with 1-based indices.
    pub fn ie(n: usize, i: usize, j: usize) -> Self {
        let z = Complex::new(int(0), int(1));
        Self::zero(n)
            .with(i - 1, j - 1, z.clone())
            .with(j - 1, i - 1, z)
    }

    /// Purely imaginary diagonal `i·diag(d)`.
    pub fn i_diag(d: &[Rational]) -> Self {
        let n = d.len();
        Self::from_fn(n, |r, c| {
            if r == c {
                Complex::new(int(0), d[r].clone())
            } else {
                gz()
            }
        })
    }

    fn with(mut self, r: usize, c: usize, v: Gaussian) -> Self {
        self.entries[r * self.n + c] = v;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &Gaussian {
        &self.entries[r * self.n + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.is_zero())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::InvalidInput(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(AlgElement {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        AlgElement {
            n: self.n,
            entries: self.entries.iter().map(|z| z.scale(s.clone())).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        Ok(Self::from_fn(n, |r, c| {
            (0..n).fold(gz(), |acc, k| acc + self.get(r, k) * other.get(k, c))
        }))
    }

    /// `[X, Y] = XY − YX`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.matmul(other)?.sub(&other.matmul(self)?)
    }

    /// `Re tr(XY)`.
    pub fn re_trace_product(&self, other: &Self) -> Result<Rational> {
        self.check_dim(other)?;
        let n = self.n;
        let mut acc = Rational::zero();
        for r in 0..n {
            for c in 0..n {
                let (a, b) = (self.get(r, c), other.get(c, r));
                if !a.is_zero() && !b.is_zero() {
                    acc += &a.re * &b.re - &a.im * &b.im;
                }
            }
        }
        Ok(acc)
    }

    pub fn is_skew_hermitian(&self) -> bool {
        (0..self.n).all(|r| (0..self.n).all(|c| *self.get(r, c) == -self.get(c, r).conj()))
    }

    pub fn trace(&self) -> Gaussian {
        (0..self.n).fold(gz(), |acc, k| acc + self.get(k, k))
    }

    /// Real coordinates `(Re, Im)` of every entry, for rank computations.
    pub fn real_coords(&self) -> Vec<Rational> {
        self.entries
            .iter()
            .flat_map(|z| [z.re.clone(), z.im.clone()])
            .collect()
    }

    pub fn sparse(&self) -> Vec<SparseEntry> {
        (0..self.n * self.n)
            .filter(|k| !self.entries[*k].is_zero())
            .map(|k| SparseEntry {
                row: k / self.n + 1,
                col: k % self.n + 1,
                value: show_gaussian(&self.entries[k]),
            })
            .collect()
    }
}

impl fmt::Display for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sparse()
            .iter()
            .map(|e| format!("({},{})={}", e.row, e.col, e.value))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// One nonzero entry, 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseEntry {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

impl Serialize for AlgElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            n: usize,
            entries: Vec<SparseEntry>,
        }
        Wire {
            n: self.n,
            entries: self.sparse(),
        }
        .serialize(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algebra {
    So,
    Su,
    /// The abelian algebra of purely imaginary diagonal matrices.
    Torus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepType {
    Orthogonal,
    Unitary,
    Symplectic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summand {
    pub basis: Vec<AlgElement>,
    pub rep: RepType,
    pub dim: usize,
    /// Summands with equal labels are equivalent representations of `𝔨`.
    pub class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsotropyDecomposition {
    pub name: String,
    pub algebra: Algebra,
    /// Matrix size.
    pub n: usize,
    /// `Q(X, Y) = −q_scale · Re tr(XY)`.
    #[serde(with = "crate::exactalg::rational::rat_string")]
    pub q_scale: Rational,
    pub k_basis: Vec<AlgElement>,
    pub summands: Vec<Summand>,
}

pub const ORBIT_NAMES: [&str; 5] = ["stiefel", "flag", "su3u1", "su2", "t3"];

/// Parses `stiefel:4`, `flag:2,3`, `su3u1`, `su2` or `t3`.
pub fn parse_orbit(spec: &str) -> Result<IsotropyDecomposition> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim(), p),
        None => (spec.trim(), ""),
    };
    let params = params
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<usize>().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("bad orbit parameter `{p}`"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    standard_decomposition(name, &params)
}

pub fn standard_decomposition(name: &str, params: &[usize]) -> Result<IsotropyDecomposition> {
    let need = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "{name} takes {k} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let orth = |basis: Vec<AlgElement>, class: usize| Summand {
        dim: basis.len(),
        basis,
        rep: RepType::Orthogonal,
        class,
    };
    let so_k = |size: usize, idx: &[usize]| -> Vec<AlgElement> {
        let mut v = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                v.push(AlgElement::e(size, i, j));
            }
        }
        v
    };
    let d = match name {
        "stiefel" => {
            need(1)?;
            let n = params[0];
            if n < 3 {
                return Err(Error::OutOfRange(format!("stiefel needs n >= 3, got {n}")));
            }
            let size = n + 1;
            IsotropyDecomposition {
                name: format!("stiefel:{n}"),
                algebra: Algebra::So,
                n: size,
                q_scale: rat(1, 2),
                k_basis: so_k(size, &(3..=size).collect::<Vec<_>>()),
                summands: vec![
                    orth((1..n).map(|i| AlgElement::e(size, 1, 2 + i)).collect(), 0),
                    orth((1..n).map(|i| AlgElement::e(size, 2, 2 + i)).collect(), 0),
                    orth(vec![AlgElement::e(size, 1, 2)], 1),
                ],
            }
        }
        "flag" => {
            need(2)?;
            let (n1, n2) = (params[0], params[1]);
            if n1 < 2 || n2 < 2 {
                return Err(Error::OutOfRange(format!(
                    "flag needs n1, n2 >= 2, got ({n1}, {n2})"
                )));
            }
            let size = n1 + n2 + 2;
            let mut k = so_k(size, &(3..3 + n1).collect::<Vec<_>>());
            k.extend(so_k(size, &(3 + n1..=size).collect::<Vec<_>>()));
            let mut mixed = Vec::new();
            for i in 1..=n1 {
                for j in 1..=n2 {
                    mixed.push(AlgElement::e(size, 2 + i, 2 + n1 + j));
                }
            }
            IsotropyDecomposition {
                name: format!("flag:{n1},{n2}"),
                algebra: Algebra::So,
                n: size,
                q_scale: rat(1, 2),
                k_basis: k,
                summands: vec![
                    orth(mixed, 0),
                    orth((1..=n1).map(|j| AlgElement::e(size, 1, 2 + j)).collect(), 1),
                    orth((1..=n1).map(|j| AlgElement::e(size, 2, 2 + j)).collect(), 1),
                    orth(
                        (1..=n2)
                            .map(|j| AlgElement::e(size, 1, 2 + n1 + j))
                            .collect(),
                        2,
                    ),
                    orth(
                        (1..=n2)
                            .map(|j| AlgElement::e(size, 2, 2 + n1 + j))
                            .collect(),
                        2,
                    ),
                    orth(vec![AlgElement::e(size, 1, 2)], 3),
                ],
            }
        }
        "su3u1" => {
            need(0)?;
            let unitary = |basis: Vec<AlgElement>| Summand {
                dim: basis.len(),
                basis,
                rep: RepType::Unitary,
                class: 0,
            };
            IsotropyDecomposition {
                name: "su3u1".into(),
                algebra: Algebra::Su,
                n: 3,
                q_scale: rat(1, 2),
                k_basis: vec![AlgElement::i_diag(&[int(2), int(-1), int(-1)])],
                summands: vec![
                    unitary(vec![AlgElement::e(3, 1, 2), AlgElement::ie(3, 1, 2)]),
                    unitary(vec![AlgElement::e(3, 1, 3), AlgElement::ie(3, 1, 3)]),
                    orth(vec![AlgElement::e(3, 2, 3)], 1),
                    orth(vec![AlgElement::ie(3, 2, 3)], 1),
                    orth(vec![AlgElement::i_diag(&[int(0), int(1), int(-1)])], 1),
                ],
            }
        }
        "su2" => {
            need(0)?;
            // X_k = −(i/2)σ_k, so [X₁, X₂] = X₃ cyclically
            let h = rat(1, 2);
            let x1 = AlgElement::ie(2, 1, 2).scale(&-&h);
            let x2 = AlgElement::e(2, 1, 2).scale(&-&h);
            let x3 = AlgElement::i_diag(&[-&h, h.clone()]);
            IsotropyDecomposition {
                name: "su2".into(),
                algebra: Algebra::Su,
                n: 2,
                q_scale: int(2),
                k_basis: vec![],
                summands: vec![orth(vec![x1], 0), orth(vec![x2], 0), orth(vec![x3], 0)],
            }
        }
        "t3" => {
            need(0)?;
            let t = |k: usize| {
                AlgElement::i_diag(&(0..3).map(|j| int((j == k) as i64)).collect::<Vec<_>>())
            };
            IsotropyDecomposition {
                name: "t3".into(),
                algebra: Algebra::Torus,
                n: 3,
                q_scale: int(1),
                k_basis: vec![],
                summands: (0..3).map(|k| orth(vec![t(k)], 0)).collect(),
            }
        }
        other => {
            return Err(Error::UnknownName(format!(
                "orbit `{other}`; expected one of {}",
                ORBIT_NAMES.join(", ")
            )))
        }
    };
    Ok(d)
}

impl IsotropyDecomposition {
    pub fn q(&self, x: &AlgElement, y: &AlgElement) -> Result<Rational> {
        Ok(-(&self.q_scale * x.re_trace_product(y)?))
    }

    pub fn dims(&self) -> Vec<usize> {
        self.summands.iter().map(|s| s.dim).collect()
    }

    /// Algebra dimension over ℝ.
    pub fn algebra_dim(&self) -> usize {
        match self.algebra {
            Algebra::So => self.n * (self.n - 1) / 2,
            Algebra::Su => self.n * self.n - 1,
            Algebra::Torus => self.n,
        }
    }

    fn p_basis(&self) -> impl Iterator<Item = &AlgElement> {
        self.summands.iter().flat_map(|s| &s.basis)
    }

    /// `𝔭`-components of `x` along each summand basis vector.
    pub fn p_coefficients(&self, x: &AlgElement) -> Result<Vec<Vec<Rational>>> {
        self.summands
            .iter()
            .map(|s| {
                s.basis
                    .iter()
                    .map(|y| Ok(self.q(x, y)? / self.q(y, y)?))
                    .collect()
            })
            .collect()
    }

    pub fn project(&self, x: &AlgElement) -> Result<AlgElement> {
        self.combine(&self.p_coefficients(x)?)
    }

    fn combine(&self, coeffs: &[Vec<Rational>]) -> Result<AlgElement> {
        let mut out = AlgElement::zero(self.n);
        for (s, cs) in self.summands.iter().zip(coeffs) {
            for (y, c) in s.basis.iter().zip(cs) {
                out = out.add(&y.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Verifies membership, orthonormality, orthogonality, dimension count and `ad(𝔨)`-invariance.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Inconsistent(format!("{}: {m}", self.name)));
        let all: Vec<&AlgElement> = self.k_basis.iter().chain(self.p_basis()).collect();
        for x in &all {
            if x.dim() != self.n || !x.is_skew_hermitian() {
                return bad(format!("{x} is not skew-Hermitian of size {}", self.n));
            }
            if self.algebra == Algebra::Su && !x.trace().is_zero() {
                return bad(format!("{x} is not traceless"));
            }
        }
        if all.len() != self.algebra_dim() {
            return bad(format!(
                "{} basis vectors for an algebra of dimension {}",
                all.len(),
                self.algebra_dim()
            ));
        }
        for (a, x) in all.iter().enumerate() {
            for (b, y) in all.iter().enumerate().skip(a) {
                let v = self.q(x, y)?;
                let in_p = a >= self.k_basis.len();
                if a == b && in_p && v != int(1) {
                    return bad(format!("Q({x}, {x}) = {v}, expected 1"));
                }
                if a != b && !v.is_zero() {
                    return bad(format!("Q({x}, {y}) = {v}, expected 0"));
                }
            }
        }
        for (i, s) in self.summands.iter().enumerate() {
            for k in &self.k_basis {
                for y in &s.basis {
                    let z = k.bracket(y)?;
                    let coeffs = self.p_coefficients(&z)?;
                    let leaks = coeffs
                        .iter()
                        .enumerate()
                        .any(|(j, c)| j != i && c.iter().any(|v| !v.is_zero()));
                    if leaks || self.combine(&coeffs)? != z {
                        return bad(format!("summand {} is not ad(k)-invariant", i + 1));
                    }
                }
            }
        }
        Ok(())
    }

    fn family(&self, i: usize) -> Vec<usize> {
        let c = self.summands[i].class;
        (0..self.summands.len())
            .filter(|&j| self.summands[j].class == c)
            .collect()
    }
}

/// `[X, Y]` together with its `𝔭`-projection coefficients per summand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectedBracket {
    pub bracket: AlgElement,
    pub projection: AlgElement,
    #[serde(serialize_with = "ser_coeffs")]
    pub coefficients: Vec<Vec<Rational>>,
}

fn ser_coeffs<S: serde::Serializer>(
    c: &[Vec<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<String>> = c
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    v.serialize(s)
}

pub fn bracket_project(
    x: &AlgElement,
    y: &AlgElement,
    d: &IsotropyDecomposition,
) -> Result<ProjectedBracket> {
    if x.dim() != d.n || y.dim() != d.n {
        return Err(Error::InvalidInput(format!(
            "elements must be {0}×{0} for {1}",
            d.n, d.name
        )));
    }
    let bracket = x.bracket(y)?;
    Ok(ProjectedBracket {
        projection: d.project(&bracket)?,
        coefficients: d.p_coefficients(&bracket)?,
        bracket,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceVector {
    /// `Z`, `W`, or `Z1`…`Z4`.
    pub label: String,
    pub vector: AlgElement,
}

/// The projected bracket sums attached to the equivalent pair `(i, j)` (0-based summand indices).
pub fn equivalence_vectors(
    d: &IsotropyDecomposition,
    pair: (usize, usize),
) -> Result<Vec<EquivalenceVector>> {
    let (i, j) = pair;
    let n = d.summands.len();
    if i >= n || j >= n || i == j {
        return Err(Error::OutOfRange(format!(
            "pair ({i}, {j}) for {n} summands"
        )));
    }
    let (a, b) = (&d.summands[i], &d.summands[j]);
    if a.class != b.class || a.dim != b.dim || a.rep != b.rep {
        return Err(Error::Precondition(format!(
            "summands {} and {} are not equivalent",
            i + 1,
            j + 1
        )));
    }
    let dim = a.dim;
    let sum = |terms: &mut dyn Iterator<Item = (usize, usize, i64)>| -> Result<AlgElement> {
        let mut acc = AlgElement::zero(d.n);
        for (k, l, sign) in terms {
            let z = a.basis[k].bracket(&b.basis[l])?;
            acc = acc.add(&z.scale(&int(sign)))?;
        }
        d.project(&acc)
    };
    let h = dim / 2;
    let v = |label: &str, vector: AlgElement| EquivalenceVector {
        label: label.into(),
        vector,
    };
    Ok(match a.rep {
        RepType::Orthogonal => vec![v("Z", sum(&mut (0..dim).map(|k| (k, k, 1)))?)],
        RepType::Unitary => vec![
            v("Z", sum(&mut (0..dim).map(|k| (k, k, 1)))?),
            v(
                "W",
                sum(&mut (0..h).flat_map(|k| [(k, k + h, 1), (k + h, k, -1)]))?,
            ),
        ],
        RepType::Symplectic => vec![
            v("Z1", sum(&mut (0..h).map(|k| (k, k, 1)))?),
            v("Z2", sum(&mut (h..dim).map(|k| (k, k - h, 1)))?),
            v("Z3", sum(&mut (0..h).map(|k| (k, k + h, 1)))?),
            v("Z4", sum(&mut (h..dim).map(|k| (k, k, 1)))?),
        ],
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    /// 1-based summand indices.
    pub summands: Vec<usize>,
    pub rep: RepType,
    pub required_dim: usize,
    pub achieved_dim: usize,
    pub vectors: Vec<EquivalenceVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagonalizabilityVerdict {
    pub orbit: String,
    pub diagonalizable: bool,
    /// `diagonalizable`, `not diagonalizable by this method`, `monotypic`, or `method inconclusive`.
    pub verdict: String,
    pub required_dim: usize,
    pub achieved_dim: usize,
    pub rule_applied: String,
    pub families: Vec<FamilyReport>,
}

fn span_dim(vs: &[&AlgElement]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    rank(&vs.iter().map(|v| v.real_coords()).collect::<Vec<_>>())
}

/// Counts the off-diagonal functions of all equivalent families and compares with the rank of
/// the associated projected bracket sums.
pub fn diagonalizability_verdict(d: &IsotropyDecomposition) -> Result<DiagonalizabilityVerdict> {
    d.validate()?;
    let mut seen = Vec::new();
    let mut families = Vec::new();
    for i in 0..d.summands.len() {
        let fam = d.family(i);
        if fam.len() < 2 || seen.contains(&fam) {
            continue;
        }
        seen.push(fam.clone());
        let rep = d.summands[i].rep;
        let r = fam.len();
        let per_pair = match rep {
            RepType::Orthogonal => 1,
            RepType::Unitary => 2,
            RepType::Symplectic => 4,
        };
        let mut vectors = Vec::new();
        for (a, &p) in fam.iter().enumerate() {
            for &q in &fam[a + 1..] {
                vectors.extend(equivalence_vectors(d, (p, q))?);
            }
        }
        let achieved = span_dim(&vectors.iter().map(|v| &v.vector).collect::<Vec<_>>());
        families.push(FamilyReport {
            summands: fam.iter().map(|k| k + 1).collect(),
            rep,
            required_dim: per_pair * r * (r - 1) / 2,
            achieved_dim: achieved,
            vectors,
        });
    }
    let required: usize = families.iter().map(|f| f.required_dim).sum();
    let all: Vec<&AlgElement> = families
        .iter()
        .flat_map(|f| f.vectors.iter().map(|v| &v.vector))
        .collect();
    let achieved = span_dim(&all);
    let rule = |s: &str| s.to_string();
    let (diagonalizable, verdict, rule_applied) = if families.is_empty() {
        (
            true,
            "monotypic",
            rule("no equivalent summands: invariant metrics are diagonal"),
        )
    } else if families.windows(2).any(|w| w[0].rep != w[1].rep) {
        (
            false,
            "method inconclusive",
            rule("mixed representation types: per-family results only"),
        )
    } else {
        let ok = achieved == required;
        let rule_applied = if d.k_basis.is_empty() {
            rule("trivial isotropy: orthogonal r-summand test")
        } else {
            match (families[0].rep, families.len(), families[0].summands.len()) {
                (RepType::Orthogonal, 1, 2) => rule("two orthogonal summands: Z != 0"),
                (RepType::Unitary, 1, 2) => rule("two unitary summands: dim span{Z, W} = 2"),
                (RepType::Symplectic, 1, 2) => {
                    rule("two symplectic summands: dim span{Z1..Z4} = 4")
                }
                (rep, _, _) => format!(
                    "{rep:?} families: span dimension equals number of off-diagonal functions"
                )
                .to_lowercase(),
            }
        };
        (
            ok,
            if ok {
                "diagonalizable"
            } else {
                "not diagonalizable by this method"
            },
            rule_applied,
        )
    };
    Ok(DiagonalizabilityVerdict {
        orbit: d.name.clone(),
        diagonalizable,
        verdict: verdict.into(),
        required_dim: required,
        achieved_dim: achieved,
        rule_applied,
        families,
    })
}
