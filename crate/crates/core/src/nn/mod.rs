//! Small dense networks in double precision.
//!
//! An [`Mlp`] is a stack of affine layers with `tanh` between them and no
//! activation on the last layer. The policy head applies a softmax to those
//! raw outputs; the value head reads the single output directly.
//!
//! Initialization: every weight is drawn from `U(-g/sqrt(fan_in), g/sqrt(fan_in))`
//! with gain `g = 1`, except the final layer of a policy network which uses
//! `g = 0.01` so the untrained policy is close to uniform. Biases start at zero.

mod adam;
mod checkpoint;
mod grad_check;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{read_f64_vec, read_u32, read_u64, write_f64_slice, write_u32, write_u64};
pub use grad_check::{max_relative_error, numeric_gradient, relative_error, RELATIVE_ERROR_FLOOR};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const POLICY_HIDDEN: [usize; 3] = [128, 128, 64];
pub const VALUE_HIDDEN: [usize; 3] = [128, 64, 32];
const POLICY_OUTPUT_GAIN: f64 = 0.01;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadKind {
    SoftmaxPolicy,
    ScalarValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    in_dim: usize,
    out_dim: usize,
    /// Row-major `out_dim x in_dim`.
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    pub fn from_parts(in_dim: usize, out_dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self, NnError> {
        if weights.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(NnError::Shape(format!(
                "expected {out_dim}x{in_dim} weights and {out_dim} biases"
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weights,
            bias,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    fn forward_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        let nonzero: Vec<usize> = (0..self.in_dim).filter(|&i| input[i] != 0.0).collect();
        // binary observations are mostly zero
        let sparse = nonzero.len() * 4 < self.in_dim;
        for (o, &b) in self.bias.iter().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let dot: f64 = if sparse {
                nonzero.iter().map(|&i| row[i] * input[i]).sum()
            } else {
                row.iter().zip(input).map(|(w, x)| w * x).sum()
            };
            out.push(b + dot);
        }
    }
}

/// Gradients (or Adam moments) shaped like an [`Mlp`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            weights: net.layers.iter().map(|l| vec![0.0; l.weights.len()]).collect(),
            biases: net.layers.iter().map(|l| vec![0.0; l.bias.len()]).collect(),
        }
    }

    pub fn fill(&mut self, value: f64) {
        for v in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            v.fill(value);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for v in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            v.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn add_scaled(&mut self, other: &Gradients, factor: f64) {
        for (a, b) in self
            .weights
            .iter_mut()
            .chain(self.biases.iter_mut())
            .zip(other.weights.iter().chain(other.biases.iter()))
        {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += factor * y);
        }
    }

    /// Flattened in the same order as [`Mlp::flat_params`].
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.weights
            .iter()
            .chain(self.biases.iter())
            .flatten()
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Per-layer activations from one forward pass: `input`, each hidden `tanh` output, raw output.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    activations: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("cache holds at least the input")
    }

    pub fn penultimate(&self) -> &[f64] {
        &self.activations[self.activations.len() - 2]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    layers: Vec<Dense>,
    head: HeadKind,
}

impl Mlp {
    /// `sizes` lists every width from input to output, e.g. `[136, 128, 128, 64, 11]`.
    pub fn init(sizes: &[usize], head: HeadKind, seed: u64) -> Self {
        assert!(sizes.len() >= 2, "need at least input and output widths");
        assert!(sizes.iter().all(|&s| s > 0), "layer widths must be positive");
        if head == HeadKind::ScalarValue {
            assert_eq!(*sizes.last().unwrap(), 1, "value head has one output");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = sizes.len() - 1;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, pair)| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let gain = if k + 1 == n && head == HeadKind::SoftmaxPolicy {
                    POLICY_OUTPUT_GAIN
                } else {
                    1.0
                };
                let bound = gain / (fan_in as f64).sqrt();
                let weights = (0..fan_in * fan_out)
                    .map(|_| rng.gen_range(-bound..bound))
                    .collect();
                Dense {
                    in_dim: fan_in,
                    out_dim: fan_out,
                    weights,
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        Self { layers, head }
    }

    /// 136 -> 128 -> 128 -> 64 -> 11 softmax policy.
    pub fn policy(input: usize, outputs: usize, seed: u64) -> Self {
        let mut sizes = vec![input];
        sizes.extend(POLICY_HIDDEN);
        sizes.push(outputs);
        Self::init(&sizes, HeadKind::SoftmaxPolicy, seed)
    }

    /// 136 -> 128 -> 64 -> 32 -> 1 value estimator.
    pub fn value(input: usize, seed: u64) -> Self {
        let mut sizes = vec![input];
        sizes.extend(VALUE_HIDDEN);
        sizes.push(1);
        Self::init(&sizes, HeadKind::ScalarValue, seed)
    }

    pub fn from_layers(layers: Vec<Dense>, head: HeadKind) -> Result<Self, NnError> {
        if layers.is_empty() {
            return Err(NnError::Shape("no layers".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(NnError::Shape("adjacent layer widths disagree".into()));
            }
        }
        if head == HeadKind::ScalarValue && layers.last().unwrap().out_dim != 1 {
            return Err(NnError::Shape("value head has one output".into()));
        }
        Ok(Self { layers, head })
    }

    pub fn head(&self) -> HeadKind {
        self.head
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![self.input_dim()];
        sizes.extend(self.layers.iter().map(|l| l.out_dim));
        sizes
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|x| x.is_finite()))
    }

    /// Parameters flattened layer by layer, weights then bias.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    /// Mutable access by position in [`Mlp::flat_params`] order.
    pub fn param_mut(&mut self, mut index: usize) -> &mut f64 {
        for l in &mut self.layers {
            if index < l.weights.len() {
                return &mut l.weights[index];
            }
            index -= l.weights.len();
            if index < l.bias.len() {
                return &mut l.bias[index];
            }
            index -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    pub fn forward(&self, input: &[f64]) -> ForwardCache {
        assert_eq!(input.len(), self.input_dim(), "input width");
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(input.to_vec());
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.out_dim);
            layer.forward_into(activations.last().unwrap(), &mut out);
            if k != last {
                out.iter_mut().for_each(|x| *x = x.tanh());
            }
            activations.push(out);
        }
        ForwardCache { activations }
    }

    pub fn forward_policy(&self, input: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.head, HeadKind::SoftmaxPolicy);
        softmax(self.forward(input).output())
    }

    pub fn forward_value(&self, input: &[f64]) -> f64 {
        debug_assert_eq!(self.head, HeadKind::ScalarValue);
        self.forward(input).output()[0]
    }

    /// Accumulates `d(objective)/d(params)` into `grads`, given the gradient
    /// with respect to the raw network output.
    pub fn backward(&self, cache: &ForwardCache, d_output: &[f64], grads: &mut Gradients) {
        assert_eq!(d_output.len(), self.output_dim(), "output gradient width");
        let mut delta = d_output.to_vec();
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &cache.activations[k];
            let gw = &mut grads.weights[k];
            let nonzero: Vec<usize> = if k == 0 {
                (0..layer.in_dim).filter(|&i| input[i] != 0.0).collect()
            } else {
                Vec::new()
            };
            let sparse = k == 0 && nonzero.len() * 4 < layer.in_dim;
            for (o, &d) in delta.iter().enumerate() {
                grads.biases[k][o] += d;
                if d == 0.0 {
                    continue;
                }
                let row = &mut gw[o * layer.in_dim..(o + 1) * layer.in_dim];
                if sparse {
                    for &i in &nonzero {
                        row[i] += d * input[i];
                    }
                } else {
                    for (g, &x) in row.iter_mut().zip(input) {
                        *g += d * x;
                    }
                }
            }
            if k == 0 {
                break;
            }
            let mut prev = vec![0.0; layer.in_dim];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (p, &w) in prev.iter_mut().zip(row) {
                    *p += w * d;
                }
            }
            // input to layer k is tanh output of layer k-1
            for (p, &h) in prev.iter_mut().zip(input) {
                *p *= 1.0 - h * h;
            }
            delta = prev;
        }
    }
}

/// Softmax with max subtraction.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

pub fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&z| (z - max).exp()).sum::<f64>().ln();
    logits.iter().map(|&z| z - lse).collect()
}

/// Shannon entropy in nats, treating `0 ln 0` as zero.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

/// Gradient of the softmax entropy with respect to the logits.
pub fn entropy_logit_grad(probs: &[f64], log_probs: &[f64]) -> Vec<f64> {
    let h = -probs
        .iter()
        .zip(log_probs)
        .map(|(&p, &lp)| p * lp)
        .sum::<f64>();
    probs
        .iter()
        .zip(log_probs)
        .map(|(&p, &lp)| -p * (lp + h))
        .collect()
}
