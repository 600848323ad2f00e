//! Exact arithmetic: rationals, polynomials, rational functions, Sturm certificates.

pub mod linalg;
pub mod mpoly;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod sturm;

pub use mpoly::{MPoly, MultiRatFunc};
pub use parse::parse_multi_ratfunc;
pub use poly::{poly_double_antiderivative, Poly};
pub use ratfunc::{ratfunc_derivative, RatFunc};
pub use rational::{format_rat, int, parse_rat, rat, to_f64, Rational};
pub use sturm::{isolate_real_roots, sturm_sign_certificate, RootInterval, SignCertificate};
