use std::f64::consts::TAU;
use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gen_gaussian, knn, neighborhood_correlation};
use crate::autoencoder::{train_autoencoder, TrainConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::interactions::PlaneBounds;
use crate::model::{DrModel, ModelKind};
use crate::pca::{fit_pca, PcaConfig};
use crate::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingAxis {
    Samples,
    Dimensions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Forward,
    Backward,
    Recompute,
}

impl std::fmt::Display for SettingAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SettingAxis::Samples => "samples",
            SettingAxis::Dimensions => "dimensions",
        })
    }
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Op::Forward => "forward",
            Op::Backward => "backward",
            Op::Recompute => "recompute",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    /// Sample counts swept at `fixed_d` dimensions.
    pub sample_counts: Vec<usize>,
    /// Dimension counts swept at `fixed_n` samples.
    pub dimension_counts: Vec<usize>,
    pub fixed_d: usize,
    pub fixed_n: usize,
    pub k: usize,
    /// Forward perturbation: this fraction of the feature's std.
    pub forward_sigma_fraction: f64,
    /// Backward perturbation: this fraction of the plane width.
    pub backward_width_fraction: f64,
    /// Multiplies both perturbations; 0 reproduces the unmodified data.
    pub perturbation_scale: f64,
    pub repeats: usize,
    pub seed: u64,
    pub models: Vec<ModelKind>,
    /// z-score features before PCA fits.
    pub pca_standardize: bool,
    pub ae_train: TrainConfig,
    /// Calls per timing sample for the (sub-microsecond) OOS operations.
    pub timing_iterations: usize,
    /// Skip timing and only measure accuracy.
    pub accuracy_only: bool,
    /// Strategy for the accuracy repeats. Timing always runs sequentially.
    pub execution: Execution,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sample_counts: vec![100, 1_000, 10_000],
            dimension_counts: vec![10, 50, 100, 500],
            fixed_d: 10,
            fixed_n: 100,
            k: 10,
            forward_sigma_fraction: 1.0 / 8.0,
            backward_width_fraction: 1.0 / 80.0,
            perturbation_scale: 1.0,
            repeats: 20,
            seed: 0,
            models: vec![ModelKind::Pca, ModelKind::Autoencoder],
            pca_standardize: false,
            ae_train: TrainConfig {
                epochs: 5,
                batch_size: 64,
                hidden: vec![32, 8],
                ..TrainConfig::default()
            },
            timing_iterations: 1_000,
            accuracy_only: false,
            execution: Execution::Parallel,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.k == 0 || self.repeats == 0 || self.fixed_d < 2 || self.fixed_n < 2 || self.timing_iterations == 0 {
            return bad("k, repeats, timing_iterations must be positive; fixed_d, fixed_n at least 2".into());
        }
        if !self.accuracy_only && self.repeats < 10 {
            return bad(format!("timing needs at least 10 repeats, got {}", self.repeats));
        }
        if self.sample_counts.iter().any(|&n| n <= self.k) || self.fixed_n <= self.k {
            return bad(format!("k = {} must be below every sample count", self.k));
        }
        if self.dimension_counts.iter().any(|&d| d < 2) {
            return bad("dimension counts must be at least 2".into());
        }
        if !(self.perturbation_scale >= 0.0) || !(self.forward_sigma_fraction > 0.0) || !(self.backward_width_fraction > 0.0) {
            return bad("perturbation fractions must be positive and the scale non-negative".into());
        }
        Ok(())
    }

    fn settings(&self) -> Vec<(SettingAxis, usize, usize, usize)> {
        let mut s: Vec<_> = self
            .sample_counts
            .iter()
            .map(|&n| (SettingAxis::Samples, n, n, self.fixed_d))
            .collect();
        s.extend(
            self.dimension_counts
                .iter()
                .map(|&d| (SettingAxis::Dimensions, d, self.fixed_n, d)),
        );
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub setting_axis: SettingAxis,
    pub setting_value: usize,
    pub model: ModelKind,
    pub op: Op,
    pub median_us: Option<f64>,
    pub accuracy_mean: Option<f64>,
    pub accuracy_std: Option<f64>,
    pub repeats: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn find(&self, axis: SettingAxis, value: usize, model: ModelKind, op: Op) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.setting_axis == axis && r.setting_value == value && r.model == model && r.op == op)
    }

    /// CSV with columns `setting_axis, setting_value, model, op, median_us,
    /// accuracy_mean, accuracy_std, repeats, seed`; missing values are empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record([
            "setting_axis",
            "setting_value",
            "model",
            "op",
            "median_us",
            "accuracy_mean",
            "accuracy_std",
            "repeats",
            "seed",
        ])
        .map_err(err)?;
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.setting_axis.to_string(),
                r.setting_value.to_string(),
                r.model.to_string(),
                r.op.to_string(),
                opt(r.median_us),
                opt(r.accuracy_mean),
                opt(r.accuracy_std),
                r.repeats.to_string(),
                r.seed.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }
}

/// SplitMix64 finalizer over a seed and a list of tags.
fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut z = seed;
    for &t in tags {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(t);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

struct Setting<'a> {
    config: &'a BenchConfig,
    kind: ModelKind,
    data: Dataset,
    model: DrModel,
    positions: Vec<Point2>,
    plane_width: f64,
    tag: [u64; 3],
}

/// One perturbation of one point, shared by the accuracy and timing passes.
struct Trial {
    query: usize,
    delta_x: Vec<f64>,
    delta_y: Point2,
}

impl<'a> Setting<'a> {
    fn new(config: &'a BenchConfig, kind: ModelKind, axis: SettingAxis, n: usize, d: usize) -> Result<Self> {
        let axis_tag = axis as u64;
        let data = gen_gaussian(n, d, derive_seed(config.seed, &[axis_tag, n as u64, d as u64]))?;
        let model = fit(config, kind, &data)?;
        let positions = model.project_all(&data)?;
        let plane_width = PlaneBounds::default_for(&positions).width();
        Ok(Setting {
            config,
            kind,
            data,
            model,
            positions,
            plane_width,
            tag: [axis_tag, n as u64, d as u64],
        })
    }

    fn trial(&self, repeat: usize) -> Trial {
        let c = self.config;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            c.seed,
            &[self.tag[0], self.tag[1], self.tag[2], self.kind as u64, repeat as u64],
        ));
        let query = rng.random_range(0..self.data.n());
        let feature = rng.random_range(0..self.data.d());
        let angle = rng.random_range(0.0..TAU);
        let mut delta_x = vec![0.0; self.data.d()];
        delta_x[feature] = c.perturbation_scale * c.forward_sigma_fraction * self.data.stats()[feature].std;
        let len = c.perturbation_scale * c.backward_width_fraction * self.plane_width;
        Trial {
            query,
            delta_x,
            delta_y: [len * angle.cos(), len * angle.sin()],
        }
    }

    fn oos_forward(&self, t: &Trial) -> Result<Point2> {
        let x = self.data.row(t.query);
        match &self.model {
            DrModel::Pca(m) => {
                let dy = m.forward(&t.delta_x)?;
                let p = self.positions[t.query];
                Ok([p[0] + dy[0], p[1] + dy[1]])
            }
            DrModel::Autoencoder(m) => {
                let moved: Vec<f64> = x.iter().zip(&t.delta_x).map(|(a, b)| a + b).collect();
                m.encode(&moved)
            }
        }
    }

    /// Feature change realizing the plane move `delta_y`.
    fn oos_backward(&self, t: &Trial) -> Result<Vec<f64>> {
        match &self.model {
            DrModel::Pca(m) => m.backward(t.delta_y),
            DrModel::Autoencoder(m) => {
                let p = self.positions[t.query];
                let from = m.decode(p);
                let to = m.decode([p[0] + t.delta_y[0], p[1] + t.delta_y[1]]);
                Ok(to.iter().zip(&from).map(|(a, b)| a - b).collect())
            }
        }
    }

    fn recompute(&self, query: usize, row: &[f64]) -> Result<Vec<Point2>> {
        let modified = self.data.with_row(query, row)?;
        fit(self.config, self.kind, &modified)?.project_all(&modified)
    }

    fn score(&self, query: usize, oos: &[Point2], recomputed: &[Point2]) -> f64 {
        let ids = |p: &[Point2]| -> Vec<usize> { knn(p, query, self.config.k).into_iter().map(|(i, _)| i).collect() };
        neighborhood_correlation(&ids(oos), &ids(recomputed), self.config.k).score
    }

    /// Forward and backward accuracy of one repeat.
    fn accuracy(&self, repeat: usize) -> Result<(f64, f64)> {
        let t = self.trial(repeat);
        let x = self.data.row(t.query);

        let mut oos = self.positions.clone();
        oos[t.query] = self.oos_forward(&t)?;
        let moved: Vec<f64> = x.iter().zip(&t.delta_x).map(|(a, b)| a + b).collect();
        let fwd = self.score(t.query, &oos, &self.recompute(t.query, &moved)?);

        let p = self.positions[t.query];
        oos[t.query] = [p[0] + t.delta_y[0], p[1] + t.delta_y[1]];
        let dx = self.oos_backward(&t)?;
        let moved: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let bwd = self.score(t.query, &oos, &self.recompute(t.query, &moved)?);
        Ok((fwd, bwd))
    }

    /// Median microseconds of (forward, backward, recompute).
    fn timings(&self) -> Result<[f64; 3]> {
        let iters = self.config.timing_iterations;
        let mut samples = [Vec::new(), Vec::new(), Vec::new()];
        for repeat in 0..self.config.repeats {
            let t = self.trial(repeat);
            let start = Instant::now();
            for _ in 0..iters {
                black_box(self.oos_forward(black_box(&t))?);
            }
            samples[0].push(start.elapsed().as_secs_f64() * 1e6 / iters as f64);

            let start = Instant::now();
            for _ in 0..iters {
                black_box(self.oos_backward(black_box(&t))?);
            }
            samples[1].push(start.elapsed().as_secs_f64() * 1e6 / iters as f64);

            let row: Vec<f64> = self.data.row(t.query).iter().zip(&t.delta_x).map(|(a, b)| a + b).collect();
            let start = Instant::now();
            black_box(self.recompute(t.query, &row)?);
            samples[2].push(start.elapsed().as_secs_f64() * 1e6);
        }
        Ok(samples.map(|mut s| median(&mut s)))
    }
}

fn fit(config: &BenchConfig, kind: ModelKind, data: &Dataset) -> Result<DrModel> {
    Ok(match kind {
        ModelKind::Pca => fit_pca(
            data,
            &PcaConfig {
                standardize: config.pca_standardize,
                ..PcaConfig::default()
            },
        )?
        .into(),
        ModelKind::Autoencoder => {
            let cfg = TrainConfig {
                batch_size: config.ae_train.batch_size.min(data.n()),
                ..config.ae_train.clone()
            };
            train_autoencoder(data, &cfg)?.into()
        }
    })
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Runs every (setting, model) pair: accuracy of OOS forward/backward
/// projection against full recomputation, and median timings of forward,
/// backward and recompute.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let mut report = BenchReport::default();
    for (axis, value, n, d) in config.settings() {
        for &kind in &config.models {
            let setting = Setting::new(config, kind, axis, n, d)?;
            let scores = config
                .execution
                .map_range(config.repeats, |r| setting.accuracy(r))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            let fwd: Vec<f64> = scores.iter().map(|s| s.0).collect();
            let bwd: Vec<f64> = scores.iter().map(|s| s.1).collect();
            let times = if config.accuracy_only {
                [None; 3]
            } else {
                setting.timings()?.map(Some)
            };
            for (op, acc, time) in [
                (Op::Forward, Some(mean_std(&fwd)), times[0]),
                (Op::Backward, Some(mean_std(&bwd)), times[1]),
                (Op::Recompute, None, times[2]),
            ] {
                report.rows.push(BenchRow {
                    setting_axis: axis,
                    setting_value: value,
                    model: kind,
                    op,
                    median_us: time,
                    accuracy_mean: acc.map(|a| a.0),
                    accuracy_std: acc.map(|a| a.1),
                    repeats: config.repeats,
                    seed: config.seed,
                });
            }
        }
    }
    Ok(report)
}
