use crate::Point2;

/// The `k` nearest neighbours of `positions[query]` (excluding itself) by
/// Euclidean distance, ascending, ties by index ascending.
pub fn knn(positions: &[Point2], query: usize, k: usize) -> Vec<(usize, f64)> {
    let q = positions[query];
    let mut all: Vec<(usize, f64)> = positions
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != query)
        .map(|(i, p)| (i, (p[0] - q[0]).hypot(p[1] - q[1])))
        .collect();
    let cmp = |a: &(usize, f64), b: &(usize, f64)| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0));
    let k = k.min(all.len());
    if k == 0 {
        return Vec::new();
    }
    if k < all.len() {
        all.select_nth_unstable_by(k - 1, cmp);
        all.truncate(k);
    }
    all.sort_unstable_by(cmp);
    all
}
