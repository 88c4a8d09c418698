//! Prolines: forward-projection paths obtained by sweeping one feature over
//! its observed range while holding the others at the point's values.

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureStats;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::DrModel;
use crate::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProlineConfig {
    /// Step between samples, in units of the feature's std.
    pub step_factor: f64,
    /// Upper bound on samples per proline; the step widens to respect it.
    pub max_samples: usize,
}

impl Default for ProlineConfig {
    fn default() -> Self {
        ProlineConfig {
            step_factor: 0.25,
            max_samples: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProlineSample {
    pub feature_value: f64,
    pub position: Point2,
}

/// Inclusive range of sample indices.
pub type IndexRange = (usize, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Proline {
    pub point_id: String,
    pub feature_index: usize,
    pub samples: Vec<ProlineSample>,
    /// Sample nearest the feature mean.
    pub mean_index: usize,
    /// Samples nearest `mean - std` / `mean + std`; absent when that value
    /// falls outside `[min, max]`.
    pub sigma_lo_index: Option<usize>,
    pub sigma_hi_index: Option<usize>,
    /// Sample nearest the point's current value of the feature.
    pub current_index: usize,
    /// Samples for values in `[current, mean + std]` (increase).
    pub green_range: Option<IndexRange>,
    /// Samples for values in `[mean - std, current]` (decrease).
    pub red_range: Option<IndexRange>,
}

impl Proline {
    /// Polyline length in plane units.
    pub fn arc_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].position[0] - w[0].position[0]).hypot(w[1].position[1] - w[0].position[1]))
            .sum()
    }

    pub fn is_degenerate(&self) -> bool {
        self.samples.len() == 1
    }

    fn nearest(&self, v: f64) -> usize {
        nearest_index(&self.samples, v)
    }
}

fn nearest_index(samples: &[ProlineSample], v: f64) -> usize {
    let i = samples.partition_point(|s| s.feature_value < v);
    if i == 0 {
        return 0;
    }
    if i == samples.len() {
        return samples.len() - 1;
    }
    if (samples[i].feature_value - v) < (v - samples[i - 1].feature_value) {
        i
    } else {
        i - 1
    }
}

/// Feature values visited by a proline: `min, min + step, ...` strictly
/// below `max`, then `max`. `step = c * std`, widened so that at most
/// `max_samples` values are produced. A constant feature yields no values.
pub fn sample_values(stats: &FeatureStats, config: &ProlineConfig) -> Vec<f64> {
    let range = stats.range();
    if stats.std == 0.0 || range <= 0.0 {
        return Vec::new();
    }
    let cap = config.max_samples.max(2);
    let step = (config.step_factor * stats.std).max(range / (cap - 1) as f64);
    let slack = 1e-9 * step;
    let mut values = Vec::new();
    let mut k = 0usize;
    loop {
        let v = stats.min + k as f64 * step;
        if v >= stats.max - slack || values.len() + 1 >= cap {
            break;
        }
        values.push(v);
        k += 1;
    }
    values.push(stats.max);
    values
}

/// Builds the proline for `feature` of the point currently at `x`.
pub fn compute_proline(
    model: &DrModel,
    stats: &[FeatureStats],
    point_id: &str,
    x: &[f64],
    feature: usize,
    config: &ProlineConfig,
) -> Result<Proline> {
    if x.len() != model.dim() || stats.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: x.len(),
        });
    }
    if feature >= x.len() {
        return Err(Error::UnknownFeature(feature.to_string()));
    }
    if !(config.step_factor > 0.0) {
        return Err(Error::InvalidConfig("proline step factor must be positive".into()));
    }
    let st = &stats[feature];
    let mut values = sample_values(st, config);
    let degenerate = values.is_empty();
    if degenerate {
        values.push(x[feature]);
    }
    let mut probe = x.to_vec();
    let samples = values
        .into_iter()
        .map(|v| {
            probe[feature] = v;
            model.project(&probe).map(|position| ProlineSample {
                feature_value: v,
                position,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut p = Proline {
        point_id: point_id.to_string(),
        feature_index: feature,
        samples,
        mean_index: 0,
        sigma_lo_index: None,
        sigma_hi_index: None,
        current_index: 0,
        green_range: None,
        red_range: None,
    };
    if degenerate {
        return Ok(p);
    }
    let current = x[feature];
    let (lo, hi) = (st.mean - st.std, st.mean + st.std);
    p.mean_index = p.nearest(st.mean);
    p.current_index = p.nearest(current);
    let in_range = |v: f64| v >= st.min && v <= st.max;
    p.sigma_lo_index = in_range(lo).then(|| p.nearest(lo));
    p.sigma_hi_index = in_range(hi).then(|| p.nearest(hi));
    let clip = |v: f64| v.clamp(st.min, st.max);
    if current <= hi && clip(current) <= clip(hi) {
        p.green_range = Some((p.nearest(clip(current)), p.nearest(clip(hi))));
    }
    if lo <= current && clip(lo) <= clip(current) {
        p.red_range = Some((p.nearest(clip(lo)), p.nearest(clip(current))));
    }
    Ok(p)
}

/// Prolines for every feature, in feature order.
pub fn compute_prolines(
    model: &DrModel,
    stats: &[FeatureStats],
    point_id: &str,
    x: &[f64],
    config: &ProlineConfig,
    exec: Execution,
) -> Result<Vec<Proline>> {
    exec.map_range(x.len(), |i| compute_proline(model, stats, point_id, x, i, config))
        .into_iter()
        .collect()
}

/// `(feature, arc length)` sorted by length descending, ties by feature
/// index ascending.
pub fn proline_lengths(
    model: &DrModel,
    stats: &[FeatureStats],
    point_id: &str,
    x: &[f64],
    config: &ProlineConfig,
    exec: Execution,
) -> Result<Vec<(usize, f64)>> {
    let lines = compute_prolines(model, stats, point_id, x, config, exec)?;
    Ok(rank_by_length(&lines))
}

pub fn rank_by_length(lines: &[Proline]) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = lines.iter().map(|p| (p.feature_index, p.arc_length())).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{compute_stats, Dataset};
    use crate::pca::{fit_pca, PcaConfig};

    fn stats(min: f64, max: f64, mean: f64, std: f64) -> FeatureStats {
        FeatureStats { mean, std, min, max }
    }

    #[test]
    fn even_division_collapses_final_sample() {
        // (max - min) / (c * std) = 4 exactly.
        let st = stats(0.0, 2.0, 1.0, 1.0);
        let cfg = ProlineConfig { step_factor: 0.5, max_samples: 200 };
        assert_eq!(sample_values(&st, &cfg), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn uneven_division_appends_max() {
        let st = stats(0.0, 1.0, 0.5, 0.4);
        let v = sample_values(&st, &ProlineConfig { step_factor: 1.0, max_samples: 200 });
        assert_eq!(v, vec![0.0, 0.4, 0.8, 1.0]);
    }

    #[test]
    fn sample_cap_is_respected() {
        let st = stats(0.0, 1000.0, 500.0, 1.0);
        let cfg = ProlineConfig::default();
        let v = sample_values(&st, &cfg);
        assert!(v.len() <= cfg.max_samples);
        assert_eq!(*v.first().unwrap(), 0.0);
        assert_eq!(*v.last().unwrap(), 1000.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    fn small_pca() -> (Dataset, DrModel) {
        let rows = vec![
            vec![1.0, 5.0, 3.0, 7.0],
            vec![2.0, 3.0, 3.0, 1.0],
            vec![4.0, 4.0, 3.0, 2.0],
            vec![0.0, 9.0, 3.0, 5.0],
            vec![3.0, 1.0, 3.0, 4.0],
        ];
        let ds = Dataset::with_default_ids((0..4).map(|j| format!("f{j}")).collect(), rows).unwrap();
        let m = fit_pca(&ds, &PcaConfig::default()).unwrap();
        (ds, m.into())
    }

    #[test]
    fn constant_feature_gives_a_dot() {
        let (ds, m) = small_pca();
        let p = compute_proline(&m, ds.stats(), "1", ds.row(1), 2, &ProlineConfig::default()).unwrap();
        assert!(p.is_degenerate());
        assert_eq!(p.samples[0].feature_value, 3.0);
        assert_eq!(p.arc_length(), 0.0);
        assert_eq!(p.samples[0].position, m.project(ds.row(1)).unwrap());
    }

    #[test]
    fn annotations_follow_the_statistics() {
        let (ds, m) = small_pca();
        let x = ds.row(0);
        let st = ds.stats()[1];
        let p = compute_proline(&m, ds.stats(), "0", x, 1, &ProlineConfig::default()).unwrap();
        assert_eq!(p.samples.first().unwrap().feature_value, st.min);
        assert_eq!(p.samples.last().unwrap().feature_value, st.max);
        let near = |v: f64| {
            (0..p.samples.len())
                .min_by(|&a, &b| {
                    (p.samples[a].feature_value - v).abs().total_cmp(&(p.samples[b].feature_value - v).abs())
                })
                .unwrap()
        };
        assert_eq!(p.mean_index, near(st.mean));
        assert_eq!(p.current_index, near(x[1]));
        assert_eq!(p.sigma_hi_index, Some(near(st.mean + st.std)));
        assert_eq!(p.sigma_lo_index, Some(near(st.mean - st.std)));
        // x[1] = 5 sits inside [mean - std, mean + std].
        assert!(x[1] > st.mean - st.std && x[1] < st.mean + st.std);
        assert_eq!(p.green_range, Some((p.current_index, p.sigma_hi_index.unwrap())));
        assert_eq!(p.red_range, Some((p.sigma_lo_index.unwrap(), p.current_index)));
    }

    #[test]
    fn out_of_range_sigma_markers_are_absent() {
        let (ds, m) = small_pca();
        let mut x = ds.row(0).to_vec();
        // Skewed column: mean - std < min.
        let col = [0.0, 0.0, 0.0, 0.0, 10.0];
        let st = compute_stats(&col);
        assert!(st.mean - st.std < st.min);
        let mut all = ds.stats().to_vec();
        all[0] = st;
        x[0] = 10.0;
        let p = compute_proline(&m, &all, "0", &x, 0, &ProlineConfig::default()).unwrap();
        assert_eq!(p.sigma_lo_index, None);
        assert!(p.sigma_hi_index.is_some());
        // Current value above mean + std: no increase segment.
        assert!(x[0] > st.mean + st.std);
        assert_eq!(p.green_range, None);
        assert_eq!(p.red_range, Some((0, p.samples.len() - 1)));
    }

    #[test]
    fn ranking_orders_by_length_then_index() {
        let (ds, m) = small_pca();
        let ranked = proline_lengths(&m, ds.stats(), "0", ds.row(0), &ProlineConfig::default(), Execution::Sequential)
            .unwrap();
        assert_eq!(ranked.len(), 4);
        assert!(ranked.windows(2).all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
        assert_eq!(ranked.last().unwrap(), &(2, 0.0));
    }
}
