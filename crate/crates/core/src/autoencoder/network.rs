//! Fully-connected network with hand-written backprop and Adam.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output `a`.
    #[inline]
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    pub inputs: usize,
    pub outputs: usize,
    /// `outputs x inputs`, row-major.
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    /// Xavier-uniform weights, zero biases.
    pub fn xavier<R: Rng>(inputs: usize, outputs: usize, activation: Activation, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs) as f64).sqrt();
        DenseLayer {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| rng.random_range(-limit..limit)).collect(),
            biases: vec![0.0; outputs],
            activation,
        }
    }

    pub fn forward_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.weights.chunks_exact(self.inputs).zip(&self.biases).map(|(w, b)| {
            let z = w.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b;
            self.activation.apply(z)
        }));
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<DenseLayer>,
}

/// Gradient buffers shaped like the network's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    fn zeros(net: &Network) -> Self {
        Gradients {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.biases.len()]).collect(),
        }
    }

    /// All entries, layer by layer, weights before biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            v.extend_from_slice(w);
            v.extend_from_slice(b);
        }
        v
    }
}

impl Network {
    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().outputs
    }

    /// Runs layers `range` on `input`.
    pub fn forward_range(&self, range: std::ops::Range<usize>, input: &[f64]) -> Vec<f64> {
        let mut cur = input.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers[range] {
            layer.forward_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.forward_range(0..self.layers.len(), input)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    /// Mutable access to the `k`-th parameter in [`Gradients::flatten`] order.
    pub fn param_mut(&mut self, mut k: usize) -> &mut f64 {
        for layer in &mut self.layers {
            if k < layer.weights.len() {
                return &mut layer.weights[k];
            }
            k -= layer.weights.len();
            if k < layer.biases.len() {
                return &mut layer.biases[k];
            }
            k -= layer.biases.len();
        }
        panic!("parameter index out of range");
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.biases).all(|v| v.is_finite()))
    }

    /// Mean squared reconstruction error over `batch` (mean over rows and
    /// output units), targets equal to inputs.
    pub fn mse(&self, batch: &[&[f64]]) -> f64 {
        let d = self.output_dim() as f64;
        let total: f64 = batch
            .iter()
            .map(|x| self.forward(x).iter().zip(x.iter()).map(|(o, t)| (o - t).powi(2)).sum::<f64>())
            .sum();
        total / (batch.len() as f64 * d)
    }

    /// Reconstruction MSE over `batch` and its gradient w.r.t. every
    /// parameter.
    pub fn loss_and_gradient(&self, batch: &[&[f64]]) -> (f64, Gradients) {
        let mut grads = Gradients::zeros(self);
        let norm = 1.0 / (batch.len() * self.output_dim()) as f64;
        let mut loss = 0.0;
        let mut acts: Vec<Vec<f64>> = vec![Vec::new(); self.layers.len() + 1];
        let mut delta = Vec::new();
        let mut prev_delta = Vec::new();
        for &x in batch {
            acts[0].clear();
            acts[0].extend_from_slice(x);
            for (l, layer) in self.layers.iter().enumerate() {
                let (head, tail) = acts.split_at_mut(l + 1);
                layer.forward_into(&head[l], &mut tail[0]);
            }
            let out = &acts[self.layers.len()];
            let last = self.layers.last().unwrap();
            delta.clear();
            for (o, t) in out.iter().zip(x) {
                let diff = o - t;
                loss += diff * diff;
                delta.push(2.0 * diff * norm * last.activation.derivative_from_output(*o));
            }
            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let input = &acts[l];
                let gw = &mut grads.weights[l];
                for (o, &dl) in delta.iter().enumerate() {
                    grads.biases[l][o] += dl;
                    if dl != 0.0 {
                        let row = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                        for (g, a) in row.iter_mut().zip(input) {
                            *g += dl * a;
                        }
                    }
                }
                if l == 0 {
                    break;
                }
                let below = self.layers[l - 1].activation;
                prev_delta.clear();
                prev_delta.resize(layer.inputs, 0.0);
                for (o, &dl) in delta.iter().enumerate() {
                    if dl != 0.0 {
                        let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                        for (p, w) in prev_delta.iter_mut().zip(row) {
                            *p += dl * w;
                        }
                    }
                }
                for (p, a) in prev_delta.iter_mut().zip(input) {
                    *p *= below.derivative_from_output(*a);
                }
                std::mem::swap(&mut delta, &mut prev_delta);
            }
        }
        (loss * norm, grads)
    }
}

/// Adam with bias correction.
#[derive(Debug, Clone)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: i32,
    m: Gradients,
    v: Gradients,
}

impl Adam {
    pub fn new(net: &Network, learning_rate: f64) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: Gradients::zeros(net),
            v: Gradients::zeros(net),
        }
    }

    pub fn update(&mut self, net: &mut Network, grads: &Gradients) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.learning_rate, self.epsilon);
        let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
            for k in 0..p.len() {
                m[k] = b1 * m[k] + (1.0 - b1) * g[k];
                v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
                p[k] -= lr * (m[k] / c1) / ((v[k] / c2).sqrt() + eps);
            }
        };
        for (l, layer) in net.layers.iter_mut().enumerate() {
            update(&mut layer.weights, &grads.weights[l], &mut self.m.weights[l], &mut self.v.weights[l]);
            update(&mut layer.biases, &grads.biases[l], &mut self.m.biases[l], &mut self.v.biases[l]);
        }
    }
}
