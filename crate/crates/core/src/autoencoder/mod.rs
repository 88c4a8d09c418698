//! Dense autoencoder as a nonlinear projection: the encoder is forward
//! projection, the decoder is (unconstrained) backward projection.
//!
//! Inputs are min/max scaled into `[0, 1]`. Hidden layers use ReLU; the
//! 2-unit bottleneck and the output layer use sigmoid, so latent codes live
//! in `(0, 1)^2` and decoded features stay inside each feature's observed
//! range. Plane coordinates are the latent codes mapped affinely onto
//! `(-1, 1)^2`.

pub mod network;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::interactions::ConstraintSet;
use crate::Point2;
pub use network::{Activation, DenseLayer, Network};

/// Hidden widths used for 784-pixel images: 784-128-32-2-32-128-784.
pub const DEFAULT_HIDDEN: [usize; 2] = [128, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    #[default]
    Mse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub loss: Loss,
    /// Encoder hidden widths; the decoder mirrors them.
    pub hidden: Vec<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 100,
            batch_size: 64,
            learning_rate: 1e-3,
            seed: 0,
            loss: Loss::Mse,
            hidden: DEFAULT_HIDDEN.to_vec(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if self.batch_size > n {
            return Err(Error::InvalidConfig(format!(
                "batch_size {} exceeds sample count {n}",
                self.batch_size
            )));
        }
        if self.hidden.contains(&0) {
            return Err(Error::InvalidConfig("hidden widths must be positive".into()));
        }
        Ok(())
    }

    /// `[d, hidden..., 2, hidden reversed..., d]`.
    pub fn layer_sizes(&self, d: usize) -> Vec<usize> {
        let mut sizes = vec![d];
        sizes.extend(&self.hidden);
        sizes.push(2);
        sizes.extend(self.hidden.iter().rev());
        sizes.push(d);
        sizes
    }
}

/// Loss trajectory of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Reconstruction MSE on the full training set before the first update.
    pub initial_mse: f64,
    /// Mean minibatch loss per epoch.
    pub epoch_losses: Vec<f64>,
    /// Reconstruction MSE on the full training set after training.
    pub final_mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "AeModelJson", try_from = "AeModelJson")]
pub struct AeModel {
    network: Network,
    /// Number of encoder layers; the encoder output is the 2-unit code.
    encoder_layers: usize,
    /// Per-feature `(min, max)` mapped to `[0, 1]`.
    input_scale: Vec<(f64, f64)>,
    /// Population std per feature, for lock tolerances.
    feature_std: Vec<f64>,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct AeModelJson {
    layer_sizes: Vec<usize>,
    activations: Vec<Activation>,
    /// One row-major `out x in` matrix per layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    input_scale: Vec<(f64, f64)>,
    feature_std: Vec<f64>,
    seed: u64,
}

impl From<AeModel> for AeModelJson {
    fn from(m: AeModel) -> Self {
        let mut layer_sizes = vec![m.network.input_dim()];
        layer_sizes.extend(m.network.layers.iter().map(|l| l.outputs));
        AeModelJson {
            layer_sizes,
            activations: m.network.layers.iter().map(|l| l.activation).collect(),
            weights: m.network.layers.iter().map(|l| l.weights.clone()).collect(),
            biases: m.network.layers.iter().map(|l| l.biases.clone()).collect(),
            input_scale: m.input_scale,
            feature_std: m.feature_std,
            seed: m.seed,
        }
    }
}

impl TryFrom<AeModelJson> for AeModel {
    type Error = Error;

    fn try_from(j: AeModelJson) -> Result<Self> {
        let layers = j.layer_sizes.len().saturating_sub(1);
        if layers < 2 || j.activations.len() != layers || j.weights.len() != layers || j.biases.len() != layers {
            return Err(Error::InvalidConfig("inconsistent layer description".into()));
        }
        let network = Network {
            layers: (0..layers)
                .map(|l| DenseLayer {
                    inputs: j.layer_sizes[l],
                    outputs: j.layer_sizes[l + 1],
                    weights: j.weights[l].clone(),
                    biases: j.biases[l].clone(),
                    activation: j.activations[l],
                })
                .collect(),
        };
        for l in &network.layers {
            if l.weights.len() != l.inputs * l.outputs || l.biases.len() != l.outputs {
                return Err(Error::InvalidConfig("layer parameter shape mismatch".into()));
            }
        }
        if !network.all_finite() {
            return Err(Error::InvalidConfig("non-finite parameters".into()));
        }
        let bottlenecks: Vec<usize> = (1..layers).filter(|&l| j.layer_sizes[l] == 2).collect();
        let encoder_layers = match bottlenecks.as_slice() {
            [b] => *b,
            _ => return Err(Error::InvalidConfig("expected exactly one width-2 bottleneck".into())),
        };
        let d = j.layer_sizes[0];
        if j.layer_sizes[layers] != d || j.input_scale.len() != d || j.feature_std.len() != d {
            return Err(Error::InvalidConfig("input/output widths disagree".into()));
        }
        Ok(AeModel {
            network,
            encoder_layers,
            input_scale: j.input_scale,
            feature_std: j.feature_std,
            seed: j.seed,
        })
    }
}

/// Trains an autoencoder on `data` and returns the model.
pub fn train_autoencoder(data: &Dataset, config: &TrainConfig) -> Result<AeModel> {
    train_with_history(data, config).map(|(m, _)| m)
}

/// Minibatch Adam on reconstruction MSE. Fully determined by `config.seed`.
pub fn train_with_history(data: &Dataset, config: &TrainConfig) -> Result<(AeModel, TrainHistory)> {
    config.validate(data.n())?;
    let d = data.d();
    let sizes = config.layer_sizes(d);
    let encoder_layers = config.hidden.len() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let layers = sizes
        .windows(2)
        .enumerate()
        .map(|(l, w)| {
            let act = if l + 1 == encoder_layers || l + 2 == sizes.len() {
                Activation::Sigmoid
            } else {
                Activation::Relu
            };
            DenseLayer::xavier(w[0], w[1], act, &mut rng)
        })
        .collect();
    let mut model = AeModel {
        network: Network { layers },
        encoder_layers,
        input_scale: data.stats().iter().map(|s| (s.min, s.max)).collect(),
        feature_std: data.stats().iter().map(|s| s.std).collect(),
        seed: config.seed,
    };

    let scaled: Vec<Vec<f64>> = data.rows().map(|r| model.scale_input(r)).collect();
    let all: Vec<&[f64]> = scaled.iter().map(Vec::as_slice).collect();
    let initial_mse = model.network.mse(&all);
    let mut opt = network::Adam::new(&model.network, config.learning_rate);
    let mut order: Vec<usize> = (0..scaled.len()).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut batch: Vec<&[f64]> = Vec::with_capacity(config.batch_size);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut batches = 0;
        for chunk in order.chunks(config.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&i| scaled[i].as_slice()));
            let (loss, grads) = model.network.loss_and_gradient(&batch);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch });
            }
            opt.update(&mut model.network, &grads);
            total += loss;
            batches += 1;
        }
        if !model.network.all_finite() {
            return Err(Error::TrainingDiverged { epoch });
        }
        epoch_losses.push(total / batches as f64);
    }
    let final_mse = model.network.mse(&all);
    Ok((
        model,
        TrainHistory {
            initial_mse,
            epoch_losses,
            final_mse,
        },
    ))
}

/// Result of decoding a plane position and testing it against constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeFeasibility {
    pub feasible: bool,
    pub x: Vec<f64>,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub feature: usize,
    pub kind: ViolationKind,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Lock,
    Lower,
    Upper,
}

impl AeModel {
    pub fn dim(&self) -> usize {
        self.input_scale.len()
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut s = vec![self.network.input_dim()];
        s.extend(self.network.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn width(&self, i: usize) -> f64 {
        let (lo, hi) = self.input_scale[i];
        if hi > lo {
            hi - lo
        } else {
            1.0
        }
    }

    pub fn scale_input(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.input_scale[i].0) / self.width(i))
            .collect()
    }

    pub fn unscale_output(&self, s: &[f64]) -> Vec<f64> {
        s.iter()
            .enumerate()
            .map(|(i, v)| self.input_scale[i].0 + v * self.width(i))
            .collect()
    }

    /// Per-feature tolerance for equality locks: `max(1e-6, 0.01 * sigma)`.
    pub fn lock_tolerance(&self, i: usize) -> f64 {
        (0.01 * self.feature_std[i]).max(1e-6)
    }

    /// Latent code of `x`, mapped to plane coordinates.
    pub fn encode(&self, x: &[f64]) -> Result<Point2> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let code = self.network.forward_range(0..self.encoder_layers, &self.scale_input(x));
        Ok([2.0 * code[0] - 1.0, 2.0 * code[1] - 1.0])
    }

    /// Features reconstructed from a plane position, in original units.
    pub fn decode(&self, y: Point2) -> Vec<f64> {
        let code = [(y[0] + 1.0) / 2.0, (y[1] + 1.0) / 2.0];
        let out = self
            .network
            .forward_range(self.encoder_layers..self.network.layers.len(), &code);
        self.unscale_output(&out)
    }

    /// Decodes `y` and checks every lock (within [`AeModel::lock_tolerance`])
    /// and bound.
    pub fn feasibility(&self, y: Point2, constraints: &ConstraintSet) -> AeFeasibility {
        let x = self.decode(y);
        let violations = self.violations(&x, constraints);
        AeFeasibility {
            feasible: violations.is_empty(),
            x,
            violations,
        }
    }

    pub fn violations(&self, x: &[f64], constraints: &ConstraintSet) -> Vec<Violation> {
        let mut out = Vec::new();
        for (i, c) in constraints.features().iter().enumerate() {
            let v = x[i];
            if let Some(lock) = c.lock {
                if (v - lock).abs() > self.lock_tolerance(i) {
                    out.push(Violation {
                        feature: i,
                        kind: ViolationKind::Lock,
                        value: v,
                        limit: lock,
                    });
                }
            }
            if v < c.lower {
                out.push(Violation {
                    feature: i,
                    kind: ViolationKind::Lower,
                    value: v,
                    limit: c.lower,
                });
            }
            if v > c.upper {
                out.push(Violation {
                    feature: i,
                    kind: ViolationKind::Upper,
                    value: v,
                    limit: c.upper,
                });
            }
        }
        out
    }

    pub fn project_all(&self, data: &Dataset) -> Result<Vec<Point2>> {
        data.rows().map(|r| self.encode(r)).collect()
    }
}
