#![allow(dead_code)]

use drx_core::Dataset;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `d x 2` basis with orthonormal columns, from the QR of a random matrix.
pub fn random_basis(d: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let m = DMatrix::from_fn(d, 2, |_, _| rng.random_range(-1.0..1.0));
    let q = m.qr().q();
    (0..d).map(|i| [q[(i, 0)], q[(i, 1)]]).collect()
}

pub fn random_dataset(n: usize, d: usize, seed: u64) -> Dataset {
    let mut r = rng(seed);
    let rows = (0..n)
        .map(|_| (0..d).map(|j| r.random_range(-1.0..1.0) * (j + 1) as f64 + j as f64).collect())
        .collect();
    Dataset::with_default_ids((0..d).map(|j| format!("f{j}")).collect(), rows).unwrap()
}
