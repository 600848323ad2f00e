//! Dense exact linear algebra on small rational matrices.

use num_traits::{One, Zero};

use super::rational::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    (0..n)
        .map(|i| {
            (0..p)
                .map(|j| (0..m).fold(Rational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn determinant(a: &RatMatrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= &m[c][c];
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    det
}

/// Solves `a x = b`; `None` when `a` is singular.
pub fn solve(a: &RatMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(p, c);
        let piv = m[c][c].clone();
        for k in c..=n {
            m[c][k] /= &piv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..=n {
                    let t = &f * &m[c][k];
                    m[r][k] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn inverse(a: &RatMatrix) -> Option<RatMatrix> {
    let n = a.len();
    let id = identity(n);
    let cols: Option<Vec<Vec<Rational>>> = (0..n)
        .map(|j| solve(a, &id.iter().map(|r| r[j].clone()).collect::<Vec<_>>()))
        .collect();
    let cols = cols?;
    Some(
        (0..n)
            .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
            .collect(),
    )
}

/// Rank over the rationals.
pub fn rank(a: &RatMatrix) -> usize {
    let mut m = a.clone();
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[r][c];
            for k in c..cols {
                let t = &f * &m[r][k];
                m[i][k] -= t;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// A nonzero vector spanning the kernel of a full-rank `(n-1) × n` matrix.
pub fn kernel_vector(a: &RatMatrix, n: usize) -> Option<Vec<Rational>> {
    // cofactor expansion: component j is (-1)^j det(a without column j)
    let v: Vec<Rational> = (0..n)
        .map(|j| {
            let minor: RatMatrix = a
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = determinant(&minor);
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    if v.iter().all(|x| x.is_zero()) {
        None
    } else {
        Some(v)
    }
}

/// Leading principal minors are all positive.
pub fn is_positive_definite(a: &RatMatrix) -> bool {
    (1..=a.len()).all(|k| {
        let sub: RatMatrix = a[..k].iter().map(|r| r[..k].to_vec()).collect();
        determinant(&sub) > Rational::zero()
    })
}
