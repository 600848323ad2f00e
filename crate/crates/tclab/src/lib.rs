//! Exact curvature computations for toric and fiberwise toric Kähler metrics.
//!
//! Everything that can be exact is computed over the rationals: scalar curvature from
//! symplectic potentials, closed-form extremal and Einstein profiles, Futaki integrals and
//! Lie-bracket span tests. Four-dimensional torus-symmetric metrics are checked numerically.

#![allow(clippy::needless_range_loop)]

pub mod cohom1;
pub mod curvature;
pub mod error;
pub mod exactalg;
pub mod hermitian;
pub mod liealg;
pub mod polytope;
pub mod potential;
pub mod torus4d;

pub use error::{Error, Result};
