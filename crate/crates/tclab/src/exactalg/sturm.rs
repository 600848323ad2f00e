//! Sturm sequences, real-root isolation and sign certificates.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::rational::{int, mid, rat, Rational};
use crate::error::{Error, Result};

/// A real root pinned to `[lo, hi]`; `lo == hi` means the root is exactly rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "super::rational::rat_string")]
    pub lo: Rational,
    #[serde(with = "super::rational::rat_string")]
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SignCertificate {
    Positive,
    NonnegativeWithRoots {
        roots: Vec<RootInterval>,
    },
    /// `witness` is a point of the interval where the polynomial is negative.
    Fails {
        #[serde(with = "super::rational::rat_string")]
        witness: Rational,
    },
}

impl SignCertificate {
    pub fn is_positive(&self) -> bool {
        matches!(self, SignCertificate::Positive)
    }
    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, SignCertificate::Fails { .. })
    }
}

pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-r);
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in seq {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct roots in `(a, b)` for `a < b` that are not roots themselves.
pub fn count_roots(seq: &[Poly], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a).saturating_sub(sign_changes(seq, b))
}

const WIDTH_NUM: i64 = 1;
const WIDTH_DEN: i64 = 2_000_000;

/// A rational in `(a, b)` that is not a root of `q`.
fn nonroot_between(q: &Poly, a: &Rational, b: &Rational) -> Rational {
    let mut k = 2i64;
    loop {
        for j in 1..k {
            let t = a + (b - a) * rat(j, k);
            if !q.eval(&t).is_zero() {
                return t;
            }
        }
        k += 1;
    }
}

/// Isolates every real root of `p` (distinct roots, ascending), refined to width < 1e-6.
pub fn isolate_real_roots(p: &Poly) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(Error::IndeterminateSign);
    }
    let q = p.squarefree();
    if q.degree() == Some(0) {
        return Ok(vec![]);
    }
    let seq = sturm_sequence(&q);
    let bound = q.cauchy_bound() + int(1);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((l, r)) = stack.pop() {
        let c = count_roots(&seq, &l, &r);
        if c == 0 {
            continue;
        }
        if c == 1 {
            out.push(refine(&q, &seq, l, r));
            continue;
        }
        let m = nonroot_between(&q, &l, &r);
        stack.push((l, m.clone()));
        stack.push((m, r));
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

fn refine(q: &Poly, seq: &[Poly], mut l: Rational, mut r: Rational) -> RootInterval {
    let width = rat(WIDTH_NUM, WIDTH_DEN);
    while &r - &l >= width {
        let m = mid(&l, &r);
        if q.eval(&m).is_zero() {
            return RootInterval {
                lo: m.clone(),
                hi: m,
            };
        }
        if count_roots(seq, &l, &m) == 1 {
            r = m;
        } else {
            l = m;
        }
    }
    let s = simplest_between(&l, &r);
    if q.eval(&s).is_zero() {
        return RootInterval {
            lo: s.clone(),
            hi: s,
        };
    }
    RootInterval { lo: l, hi: r }
}

/// Fraction with the smallest denominator in `[lo, hi]` (Stern–Brocot descent).
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.floor();
    if &fl == lo || fl.clone() + int(1) <= *hi {
        return if &fl == lo { fl } else { fl + int(1) };
    }
    // lo and hi share the integer part; recurse on reciprocals of the fractional parts
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_between(&(int(1) / b), &(int(1) / a));
    fl + int(1) / inner
}

/// Shrinks a non-exact root interval until `x` is not inside it (the root differs from `x`).
fn separate(q: &Poly, seq: &[Poly], ri: RootInterval, x: &Rational) -> RootInterval {
    let mut cur = ri;
    if !cur.is_exact() && &cur.lo < x && x < &cur.hi && q.eval(x).is_zero() {
        return RootInterval {
            lo: x.clone(),
            hi: x.clone(),
        };
    }
    while !cur.is_exact() && &cur.lo < x && x < &cur.hi {
        let (l, r) = (cur.lo.clone(), cur.hi.clone());
        if count_roots(seq, &l, x) == 1 {
            cur = RootInterval {
                lo: l,
                hi: x.clone(),
            };
        } else {
            cur = RootInterval {
                lo: x.clone(),
                hi: r,
            };
        }
        let m = mid(&cur.lo, &cur.hi);
        if q.eval(&m).is_zero() {
            return RootInterval {
                lo: m.clone(),
                hi: m,
            };
        }
    }
    cur
}

/// Sign certificate of `p` on the interval `[a, b]`; `open = (left_open, right_open)`.
pub fn sturm_sign_certificate(
    p: &Poly,
    interval: (&Rational, &Rational),
    open: (bool, bool),
) -> Result<SignCertificate> {
    let (a, b) = interval;
    if p.is_zero() {
        return Err(Error::IndeterminateSign);
    }
    if a > b || (a == b && (open.0 || open.1)) {
        return Err(Error::EmptyInterval(a.to_string(), b.to_string()));
    }
    let q = p.squarefree();
    let seq = sturm_sequence(&q);
    let mut inside: Vec<RootInterval> = Vec::new();
    for ri in isolate_real_roots(p)? {
        let mut ri = separate(&q, &seq, ri, a);
        ri = separate(&q, &seq, ri, b);
        let left_ok = if open.0 {
            ri.lo > *a || (ri.lo == *a && !ri.is_exact())
        } else {
            ri.lo >= *a
        };
        let right_ok = if open.1 {
            ri.hi < *b || (ri.hi == *b && !ri.is_exact())
        } else {
            ri.hi <= *b
        };
        let overlaps = ri.hi >= *a && ri.lo <= *b;
        if overlaps && left_ok && right_ok {
            inside.push(ri);
        }
    }
    if a == b {
        let v = p.eval(a);
        return Ok(if v.is_positive() {
            SignCertificate::Positive
        } else if v.is_zero() {
            SignCertificate::NonnegativeWithRoots { roots: inside }
        } else {
            SignCertificate::Fails { witness: a.clone() }
        });
    }
    // one sample point inside every gap between consecutive roots
    let mut edges = vec![a.clone()];
    for ri in &inside {
        edges.push(ri.lo.clone());
        edges.push(ri.hi.clone());
    }
    edges.push(b.clone());
    for pair in edges.chunks(2) {
        let (l, r) = (&pair[0], &pair[1]);
        if l >= r {
            continue;
        }
        let t = nonroot_between(&q, l, r);
        if p.eval(&t).is_negative() {
            return Ok(SignCertificate::Fails { witness: t });
        }
    }
    Ok(if inside.is_empty() {
        SignCertificate::Positive
    } else {
        SignCertificate::NonnegativeWithRoots { roots: inside }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_simple_roots() {
        let p = Poly::from_ints(&[-2, 0, 1]);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].hi < int(0) && roots[1].lo > int(0));
    }
}
