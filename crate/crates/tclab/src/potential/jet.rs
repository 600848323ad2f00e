//! Truncated multivariate Taylor expansions with exact coefficients.
//!
//! A `Jet` of order `k` in `n` variables stores the Taylor coefficients `c_α` (|α| ≤ k) of a
//! function at a base point, so `∂^α f = α! c_α`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::exactalg::rational::int;
use crate::exactalg::{MPoly, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet {
    n: usize,
    order: u32,
    coeffs: BTreeMap<Vec<u32>, Rational>,
}

fn factorial_of(alpha: &[u32]) -> Rational {
    alpha
        .iter()
        .flat_map(|&a| 1..=a as i64)
        .fold(Rational::one(), |acc, k| acc * int(k))
}

impl Jet {
    pub fn constant(n: usize, order: u32, c: Rational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(vec![0; n], c);
        }
        Jet { n, order, coeffs }
    }

    pub fn zero(n: usize, order: u32) -> Self {
        Jet {
            n,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    /// The coordinate function `x_i` expanded at a point whose `i`-th coordinate is `value`.
    pub fn variable(n: usize, order: u32, i: usize, value: Rational) -> Self {
        let mut j = Jet::constant(n, order, value);
        if order >= 1 {
            let mut e = vec![0; n];
            e[i] = 1;
            j.coeffs.insert(e, Rational::one());
        }
        j
    }

    /// Affine function `<mu, x> - lambda` expanded at `x`.
    pub fn affine(order: u32, mu: &[i64], value: Rational) -> Self {
        let n = mu.len();
        let mut j = Jet::constant(n, order, value);
        if order >= 1 {
            for (i, &m) in mu.iter().enumerate() {
                if m != 0 {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    j.coeffs.insert(e, int(m));
                }
            }
        }
        j
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn value(&self) -> Rational {
        self.coeff(&vec![0; self.n])
    }

    pub fn coeff(&self, alpha: &[u32]) -> Rational {
        self.coeffs
            .get(alpha)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Partial derivative `∂^α f` at the base point.
    pub fn partial(&self, alpha: &[u32]) -> Rational {
        assert!(alpha.iter().sum::<u32>() <= self.order, "jet order too low");
        self.coeff(alpha) * factorial_of(alpha)
    }

    /// Derivative `∂_i f` as a jet of one order less.
    pub fn d(&self, i: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let mut out = Jet::zero(self.n, self.order - 1);
        for (a, c) in &self.coeffs {
            if a[i] > 0 {
                let mut b = a.clone();
                b[i] -= 1;
                out.coeffs.insert(b, c * int(a[i] as i64));
            }
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Jet {
        let order = order.min(self.order);
        Jet {
            n: self.n,
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(a, _)| a.iter().sum::<u32>() <= order)
                .map(|(a, c)| (a.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Jet {
        if s.is_zero() {
            return Jet::zero(self.n, self.order);
        }
        Jet {
            n: self.n,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .map(|(a, c)| (a.clone(), c * s))
                .collect(),
        }
    }

    /// `1/f`; the value at the base point must be nonzero.
    pub fn recip(&self) -> Option<Jet> {
        let c0 = self.value();
        if c0.is_zero() {
            return None;
        }
        let inv0 = Rational::one() / &c0;
        // 1/(c0 + r) = (1/c0) Σ (-r/c0)^k
        let mut r = self.clone();
        r.coeffs.remove(&vec![0; self.n]);
        let step = r.scale(&-inv0.clone());
        let mut term = Jet::constant(self.n, self.order, Rational::one());
        let mut acc = term.clone();
        for _ in 0..self.order {
            term = &term * &step;
            acc = &acc + &term;
        }
        Some(acc.scale(&inv0))
    }

    pub fn powu(&self, e: u32) -> Jet {
        let mut acc = Jet::constant(self.n, self.order, Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates an exact polynomial at `x + t` where `vars[k]` is the jet of `x_k`.
    pub fn eval_mpoly(p: &MPoly, vars: &[Jet]) -> Jet {
        let n = vars[0].n;
        let order = vars.iter().map(|v| v.order).min().unwrap_or(0);
        let maxdeg: Vec<u32> = (0..vars.len()).map(|k| p.degree_in(k)).collect();
        let powers: Vec<Vec<Jet>> = vars
            .iter()
            .zip(&maxdeg)
            .map(|(v, &m)| {
                let mut out = vec![Jet::constant(n, order, Rational::one())];
                for e in 1..=m as usize {
                    let next = &out[e - 1] * v;
                    out.push(next);
                }
                out
            })
            .collect();
        let mut acc = Jet::zero(n, order);
        for (e, c) in p.terms() {
            let mut t = Jet::constant(n, order, c.clone());
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    t = &t * &powers[k][ek as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut out = self.truncate(order);
        for (a, c) in &o.coeffs {
            if a.iter().sum::<u32>() > order {
                continue;
            }
            let v = out.coeffs.entry(a.clone()).or_insert_with(Rational::zero);
            *v += c;
            if v.is_zero() {
                out.coeffs.remove(a);
            }
        }
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self + &(-o)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            n: self.n,
            order: self.order,
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let order = self.order.min(o.order);
        let mut out = Jet::zero(self.n, order);
        for (a, ca) in &self.coeffs {
            let da: u32 = a.iter().sum();
            if da > order {
                continue;
            }
            for (b, cb) in &o.coeffs {
                if da + b.iter().sum::<u32>() > order {
                    continue;
                }
                let key: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let v = out.coeffs.entry(key.clone()).or_insert_with(Rational::zero);
                *v += ca * cb;
                if v.is_zero() {
                    out.coeffs.remove(&key);
                }
            }
        }
        out
    }
}

crate::exactalg::poly::forward_owned!(Jet, Add, add);
crate::exactalg::poly::forward_owned!(Jet, Sub, sub);
crate::exactalg::poly::forward_owned!(Jet, Mul, mul);

/// Determinant and inverse of a symmetric matrix of jets by Gauss–Jordan elimination.
/// Returns `None` when a pivot vanishes at the base point.
pub fn jet_det_inverse(m: &[Vec<Jet>]) -> Option<(Jet, Vec<Vec<Jet>>)> {
    let n = m.len();
    let (nv, order) = (m[0][0].n, m[0][0].order);
    let mut a: Vec<Vec<Jet>> = m.to_vec();
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    Jet::constant(
                        nv,
                        order,
                        if i == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        },
                    )
                })
                .collect()
        })
        .collect();
    let mut det = Jet::constant(nv, order, Rational::one());
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].value().is_zero())?;
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -&det;
        }
        let p = a[col][col].clone();
        det = &det * &p;
        let pinv = p.recip()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            if f.coeffs.is_empty() {
                continue;
            }
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[col][j]);
            }
        }
    }
    Some((det, inv))
}
