//! Named potentials: canonical ones on the catalog polytopes, plus the extremal corrections on
//! the blowup and six-dimensional families obtained from the cohomogeneity-one solver.

use crate::cohom1::{solve_compact_extremal, FiberData, FiberEntry};
use crate::error::{Error, Result};
use crate::exactalg::rational::{int, rat};
use crate::exactalg::{parse_multi_ratfunc, MultiRatFunc, Poly, RatFunc, Rational};
use crate::polytope::catalog;

use super::Potential;

pub const POTENTIAL_NAMES: &[&str] = &[
    "cp1", "cp2", "cp1xcp1", "hexagon", "rect", "blowup1", "sakane6", "sixdim",
];

/// Fiber data of the toric families, reduced along the first coordinate on `[-1, 1]`.
pub fn blowup1_fiber(a: &Rational) -> Result<FiberData> {
    FiberData::new(vec![FiberEntry::new(2, rat(-1, 2), (a + int(1)) / int(2))])
}

pub fn sixdim_fiber(a: &Rational, c: &Rational) -> Result<FiberData> {
    FiberData::new(vec![
        FiberEntry::new(2, rat(-1, 2), (a + int(1)) / int(2)),
        FiberEntry::new(2, rat(1, 2), (c + int(1)) / int(2)),
    ])
}

/// `f_xx = 1/h − 1/(1 − x²) − Σ 1/(4A_j)`: the part of `1/h` not produced by the canonical potential.
pub fn correction_from_profile(w: &FiberData, h: &RatFunc) -> RatFunc {
    let base = RatFunc::new(Poly::one(), Poly::from_ints(&[1, 0, -1]));
    let fibers = w.entries().iter().fold(RatFunc::zero(), |acc, e| {
        &acc + &RatFunc::new(Poly::one(), e.poly().scale(&int(4)))
    });
    &(&h.recip() - &base) - &fibers
}

fn extremal_fxx(w: &FiberData) -> Result<RatFunc> {
    let sol = solve_compact_extremal(w, (&int(-1), &int(1)))?;
    Ok(correction_from_profile(w, &sol.h))
}

pub fn potential_catalog(name: &str, params: &[Rational]) -> Result<Potential> {
    match name {
        "cp1" | "cp2" | "cp1xcp1" | "hexagon" | "rect" => {
            Ok(Potential::canonical(catalog(name, params)?))
        }
        "blowup1" => {
            let p = catalog(name, params)?;
            let fxx = extremal_fxx(&blowup1_fiber(&params[0])?)?;
            Potential::with_fxx(p, 0, MultiRatFunc::from_ratfunc(&fxx, 2, 0))
        }
        "sixdim" => {
            let p = catalog(name, params)?;
            let fxx = extremal_fxx(&sixdim_fiber(&params[0], &params[1])?)?;
            Potential::with_fxx(p, 0, MultiRatFunc::from_ratfunc(&fxx, 3, 0))
        }
        "sakane6" => {
            let p = catalog(name, params)?;
            let fxx = parse_multi_ratfunc("(x1^2-10)/((x1^2-4)*(x1^2-7))", 3)?;
            Potential::with_fxx(p, 0, fxx)
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}
