use serde::{Deserialize, Serialize};

use super::{Gradients, Mlp};

/// Adam constants. Defaults are the common `0.9 / 0.999 / 1e-8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Gradients,
    pub v: Gradients,
    pub step: u64,
}

impl AdamState {
    pub fn new(net: &Mlp, config: AdamConfig) -> Self {
        Self {
            config,
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
            step: 0,
        }
    }

    /// One bias-corrected descent step: `params -= lr * m_hat / (sqrt(v_hat) + eps)`.
    /// Pass negated gradients to ascend.
    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients, learning_rate: f64) {
        let AdamConfig {
            beta1,
            beta2,
            epsilon,
        } = self.config;
        self.step += 1;
        let t = self.step as i32;
        let correct1 = 1.0 - beta1.powi(t);
        let correct2 = 1.0 - beta2.powi(t);

        for (k, layer) in net.layers_mut().iter_mut().enumerate() {
            let update = |p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64]| {
                for i in 0..p.len() {
                    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                    let m_hat = m[i] / correct1;
                    let v_hat = v[i] / correct2;
                    p[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
                }
            };
            update(
                layer.weights_mut(),
                &grads.weights[k],
                &mut self.m.weights[k],
                &mut self.v.weights[k],
            );
            update(
                layer.bias_mut(),
                &grads.biases[k],
                &mut self.m.biases[k],
                &mut self.v.biases[k],
            );
        }
    }
}
