//! Sparse multivariate polynomials and rational functions over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{forward_owned, Poly};
use super::ratfunc::RatFunc;
use super::rational::{int, to_f64, Rational};

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(e: Exponent, c: Rational) -> Self {
        let mut p = Self::zero(e.len());
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// Embeds a univariate polynomial as a polynomial in variable `k` of `nvars`.
    pub fn from_poly(p: &Poly, nvars: usize, k: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (d, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; nvars];
                e[k] = d as u32;
                out.terms.insert(e, c.clone());
            }
        }
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms.keys().map(|e| e[k]).max().unwrap_or(0)
    }

    /// Coefficient of the lexicographically largest monomial.
    pub fn leading_coeff(&self) -> Rational {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn insert_add(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &d) in x.iter().zip(e) {
                if d > 0 {
                    t *= num_traits::pow(xi.clone(), d as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                to_f64(c)
                    * e.iter()
                        .zip(x)
                        .map(|(&d, xi)| xi.powi(d as i32))
                        .product::<f64>()
            })
            .sum()
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut e2 = e.clone();
                e2[k] -= 1;
                out.insert_add(e2, c * int(e[k] as i64));
            }
        }
        out
    }

    /// Antiderivative in variable `k`, vanishing on `x_k = 0`.
    pub fn integrate(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2[k] += 1;
            out.insert_add(e2, c / int(e[k] as i64 + 1));
        }
        out
    }

    /// Replaces `x_k` by the constant `v` (the variable stays, with degree 0).
    pub fn substitute(&self, k: usize, v: &Rational) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let d = e2[k];
            e2[k] = 0;
            out.insert_add(e2, c * num_traits::pow(v.clone(), d as usize));
        }
        out
    }

    /// Coefficients in variable `k`, lowest degree first; each is free of `x_k`.
    pub fn coefficients_in(&self, k: usize) -> Vec<MPoly> {
        let deg = self.degree_in(k) as usize;
        let mut out = vec![Self::zero(self.nvars); deg + 1];
        if self.is_zero() {
            return vec![];
        }
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let d = e2[k] as usize;
            e2[k] = 0;
            out[d].insert_add(e2, c.clone());
        }
        out
    }

    /// Univariate view in variable `k`; `None` if another variable occurs.
    pub fn to_poly(&self, k: usize) -> Option<Poly> {
        let mut c = vec![Rational::zero(); self.degree_in(k) as usize + 1];
        for (e, v) in &self.terms {
            if e.iter().enumerate().any(|(i, &d)| i != k && d > 0) {
                return None;
            }
            c[e[k] as usize] = v.clone();
        }
        Some(Poly::new(c))
    }

    /// Positive rational `c` such that `self / c` has coprime integer coefficients.
    pub fn content(&self) -> Rational {
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            return Rational::one();
        }
        Rational::new(g, l)
    }

    /// Same polynomial in a larger variable set; variable `i` goes to `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &d) in e.iter().enumerate() {
                e2[map[i]] += d;
            }
            out.insert_add(e2, c.clone());
        }
        out
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mono = Vec::new();
            for (i, &d) in e.iter().enumerate() {
                match d {
                    0 => {}
                    1 => mono.push(names[i].to_string()),
                    _ => mono.push(format!("{}^{}", names[i], d)),
                }
            }
            let cs = if c.denom().is_one() {
                c.numer().to_string()
            } else {
                format!("({}/{})", c.numer(), c.denom())
            };
            if mono.is_empty() {
                parts.push(cs);
            } else if c.is_one() {
                parts.push(mono.join("*"));
            } else if (-c).is_one() {
                parts.push(format!("-{}", mono.join("*")));
            } else {
                parts.push(format!("{}*{}", cs, mono.join("*")));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

impl Add<&MPoly> for &MPoly {
    type Output = MPoly;
    fn add(self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert_add(e.clone(), c.clone());
        }
        out
    }
}

impl Sub<&MPoly> for &MPoly {
    type Output = MPoly;
    fn sub(self, o: &MPoly) -> MPoly {
        self + &(-o)
    }
}

impl Mul<&MPoly> for &MPoly {
    type Output = MPoly;
    fn mul(self, o: &MPoly) -> MPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut acc: BTreeMap<Exponent, Rational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(Rational::zero) += c1 * c2;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        MPoly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        -&self
    }
}

forward_owned!(MPoly, Add, add);
forward_owned!(MPoly, Sub, sub);
forward_owned!(MPoly, Mul, mul);

/// Quotient of multivariate polynomials; the denominator is kept primitive with a positive
/// leading coefficient (no multivariate gcd is taken).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiRatFunc {
    num: MPoly,
    den: MPoly,
}

impl MultiRatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        assert_eq!(num.nvars(), den.nvars());
        if num.is_zero() {
            return Self::from_poly(num);
        }
        let mut s = Rational::one() / den.content();
        if den.leading_coeff().is_negative() {
            s = -s;
        }
        let (num, den) = (num.scale(&s), den.scale(&s));
        if den.is_constant() {
            let c = den.constant_term();
            let n = den.nvars();
            return MultiRatFunc {
                num: num.scale(&(Rational::one() / c)),
                den: MPoly::one(n),
            };
        }
        MultiRatFunc { num, den }
    }

    pub fn from_poly(p: MPoly) -> Self {
        let n = p.nvars();
        MultiRatFunc {
            num: p,
            den: MPoly::one(n),
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(MPoly::zero(nvars))
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_poly(MPoly::constant(nvars, c))
    }

    /// Embeds a univariate rational function in variable `k`.
    pub fn from_ratfunc(r: &RatFunc, nvars: usize, k: usize) -> Self {
        Self::new(
            MPoly::from_poly(r.num(), nvars, k),
            MPoly::from_poly(r.den(), nvars, k),
        )
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &[Rational]) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    pub fn derivative(&self, k: usize) -> Self {
        let n = &(&self.num.derivative(k) * &self.den) - &(&self.num * &self.den.derivative(k));
        Self::new(n, &self.den * &self.den)
    }

    /// Univariate view in variable `k`, if no other variable occurs.
    pub fn to_ratfunc(&self, k: usize) -> Option<RatFunc> {
        Some(RatFunc::new(self.num.to_poly(k)?, self.den.to_poly(k)?))
    }

    pub fn to_string_with(&self, names: &[&str]) -> String {
        if self.den.is_constant() {
            self.num.to_string_with(names)
        } else {
            format!(
                "({})/({})",
                self.num.to_string_with(names),
                self.den.to_string_with(names)
            )
        }
    }
}

impl fmt::Display for MultiRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars());
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

impl Add<&MultiRatFunc> for &MultiRatFunc {
    type Output = MultiRatFunc;
    fn add(self, o: &MultiRatFunc) -> MultiRatFunc {
        if self.den == o.den {
            return MultiRatFunc::new(&self.num + &o.num, self.den.clone());
        }
        MultiRatFunc::new(
            &(&self.num * &o.den) + &(&o.num * &self.den),
            &self.den * &o.den,
        )
    }
}

impl Sub<&MultiRatFunc> for &MultiRatFunc {
    type Output = MultiRatFunc;
    fn sub(self, o: &MultiRatFunc) -> MultiRatFunc {
        self + &(-o)
    }
}

impl Mul<&MultiRatFunc> for &MultiRatFunc {
    type Output = MultiRatFunc;
    fn mul(self, o: &MultiRatFunc) -> MultiRatFunc {
        MultiRatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &MultiRatFunc {
    type Output = MultiRatFunc;
    fn neg(self) -> MultiRatFunc {
        MultiRatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for MultiRatFunc {
    type Output = MultiRatFunc;
    fn neg(self) -> MultiRatFunc {
        -&self
    }
}

impl MultiRatFunc {
    pub fn div(&self, o: &MultiRatFunc) -> MultiRatFunc {
        assert!(!o.is_zero(), "division by zero");
        MultiRatFunc::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn powi(&self, e: i32) -> MultiRatFunc {
        let base = if e < 0 {
            MultiRatFunc::new(self.den.clone(), self.num.clone())
        } else {
            self.clone()
        };
        let k = e.unsigned_abs();
        MultiRatFunc::new(base.num.pow(k), base.den.pow(k))
    }
}

forward_owned!(MultiRatFunc, Add, add);
forward_owned!(MultiRatFunc, Sub, sub);
forward_owned!(MultiRatFunc, Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::rat;

    #[test]
    fn derivative_and_integral_invert() {
        let x = MPoly::var(2, 0);
        let y = MPoly::var(2, 1);
        let p = &(&x * &x) * &y + y.scale(&rat(3, 2));
        assert_eq!(p.integrate(0).derivative(0), p);
    }

    #[test]
    fn denominator_normalised() {
        let x = MPoly::var(1, 0);
        let r = MultiRatFunc::new(MPoly::one(1), x.scale(&int(-4)));
        assert_eq!(r.den().leading_coeff(), int(1));
        assert_eq!(r.eval(&[int(1)]).unwrap(), rat(-1, 4));
    }
}
