use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// `n` i.i.d. rows from `N(0, diag(1, 2, ..., d) / d)`.
pub fn gen_gaussian(n: usize, d: usize, seed: u64) -> Result<Dataset> {
    if n < 2 || d < 2 {
        return Err(Error::InvalidConfig(format!("need n >= 2 and d >= 2, got n={n}, d={d}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normals: Vec<Normal<f64>> = (1..=d)
        .map(|j| Normal::new(0.0, (j as f64 / d as f64).sqrt()).expect("positive std"))
        .collect();
    let rows = (0..n)
        .map(|_| normals.iter().map(|dist| dist.sample(&mut rng)).collect())
        .collect();
    Dataset::with_default_ids((0..d).map(|j| format!("x{j}")).collect(), rows)
}
