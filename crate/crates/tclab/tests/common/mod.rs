#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tclab::exactalg::{int, Rational};
use tclab::polytope::Polytope;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly positive rational convex combination of the vertices.
pub fn interior_point(p: &Polytope, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let w: Vec<i64> = p.vertices().iter().map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = w.iter().sum();
    (0..p.dim())
        .map(|k| {
            p.vertices()
                .iter()
                .zip(&w)
                .fold(int(0), |acc, (v, wi)| acc + &v[k] * int(*wi))
                / int(total)
        })
        .collect()
}

pub fn interior_points(p: &Polytope, k: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut r = rng(seed);
    (0..k).map(|_| interior_point(p, &mut r)).collect()
}

pub fn catalog_params(name: &str) -> Vec<Rational> {
    match name {
        "blowup1" => vec![int(1)],
        "sixdim" => vec![int(2), int(3)],
        "rect" => vec![int(1), int(2)],
        _ => vec![],
    }
}
