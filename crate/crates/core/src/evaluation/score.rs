use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// Similarity of two ordered k-NN lists: `(overlap / k) * (1 + rho) / 2`,
/// where `rho` is the Spearman correlation between the ranks that shared
/// elements hold in each list.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodScore {
    pub overlap: usize,
    pub rank_corr: f64,
    pub score: f64,
}

pub fn neighborhood_correlation<T: Eq + Hash>(a: &[T], b: &[T], k: usize) -> NeighborhoodScore {
    assert!(k > 0, "k must be positive");
    let rank_in_b: HashMap<&T, usize> = b.iter().enumerate().map(|(r, id)| (id, r)).collect();
    // Ranks of shared elements: position in a, position in b.
    let shared: Vec<(f64, f64)> = a
        .iter()
        .enumerate()
        .filter_map(|(ra, id)| rank_in_b.get(id).map(|&rb| (ra as f64, rb as f64)))
        .collect();
    let overlap = shared.len();
    let rank_corr = if overlap <= 1 { 1.0 } else { spearman(&shared) };
    NeighborhoodScore {
        overlap,
        rank_corr,
        score: overlap as f64 / k as f64 * (1.0 + rank_corr) / 2.0,
    }
}

/// Pearson correlation of the re-ranked coordinates (ranks are distinct
/// positions, so no tie correction is needed).
fn spearman(pairs: &[(f64, f64)]) -> f64 {
    let rerank = |vals: Vec<f64>| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let mut r = vec![0.0; vals.len()];
        for (rank, i) in idx.into_iter().enumerate() {
            r[i] = (rank + 1) as f64;
        }
        r
    };
    let ra = rerank(pairs.iter().map(|p| p.0).collect());
    let rb = rerank(pairs.iter().map(|p| p.1).collect());
    let n = ra.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - mean) * (y - mean);
        va += (x - mean).powi(2);
        vb += (y - mean).powi(2);
    }
    (cov / (va * vb).sqrt()).clamp(-1.0, 1.0)
}
