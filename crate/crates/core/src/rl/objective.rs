use super::advantage::clip;
use super::collect::Batch;
use crate::nn::{entropy_logit_grad, log_softmax, Gradients, Mlp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surrogate {
    /// `log π(a|s) · w`
    LogProb,
    /// `min(r w, clip(r, 1-ε, 1+ε) w)` with `r = π(a|s) / π_old(a|s)`
    Clipped { epsilon: f64 },
}

#[derive(Debug, Clone)]
pub struct PolicyEval {
    /// Mean surrogate plus `β` times mean entropy.
    pub objective: f64,
    /// Gradient of `objective` (ascent direction).
    pub grads: Gradients,
    pub mean_entropy: f64,
    pub max_ratio_deviation: f64,
    /// Share of transitions on the constant branch of the clipped surrogate.
    pub clip_fraction: f64,
}

struct Term {
    value: f64,
    d_logits: Vec<f64>,
    entropy: f64,
    ratio: f64,
    clipped: bool,
}

fn term(
    logits: &[f64],
    action: usize,
    weight: f64,
    old_log_prob: f64,
    surrogate: Surrogate,
    beta: f64,
    scale: f64,
) -> Term {
    let log_probs = log_softmax(logits);
    let probs: Vec<f64> = log_probs.iter().map(|l| l.exp()).collect();
    let h = -probs.iter().zip(&log_probs).map(|(p, l)| p * l).sum::<f64>();
    let lp = log_probs[action];
    let ratio = (lp - old_log_prob).exp();

    // d(surrogate)/d(log π(a|s))
    let (value, d_lp, clipped) = match surrogate {
        Surrogate::LogProb => (lp * weight, weight, false),
        Surrogate::Clipped { epsilon } => {
            let unclipped = ratio * weight;
            let clipped_value = clip(ratio, 1.0 - epsilon, 1.0 + epsilon) * weight;
            let constant =
                (weight > 0.0 && ratio > 1.0 + epsilon) || (weight < 0.0 && ratio < 1.0 - epsilon);
            if constant {
                (clipped_value, 0.0, true)
            } else {
                (unclipped.min(clipped_value), unclipped, false)
            }
        }
    };

    let ent = entropy_logit_grad(&probs, &log_probs);
    let d_logits = probs
        .iter()
        .enumerate()
        .zip(&ent)
        .map(|((k, &p), &e)| {
            let onehot = if k == action { 1.0 } else { 0.0 };
            scale * (d_lp * (onehot - p) + beta * e)
        })
        .collect();
    Term {
        value: value + beta * h,
        d_logits,
        entropy: h,
        ratio,
        clipped,
    }
}

/// Objective value alone (no backward pass).
pub fn policy_objective(policy: &Mlp, batch: &Batch, surrogate: Surrogate, beta: f64) -> f64 {
    let n = batch.len() as f64;
    batch
        .transitions
        .iter()
        .zip(&batch.weights)
        .map(|(t, &w)| {
            let logits = policy.forward(&t.observation.to_f64()).output().to_vec();
            term(&logits, t.action_index, w, t.log_prob_at_collection, surrogate, beta, 1.0).value
        })
        .sum::<f64>()
        / n
}

pub fn policy_gradient(
    policy: &Mlp,
    batch: &Batch,
    inputs: &[Vec<f64>],
    surrogate: Surrogate,
    beta: f64,
) -> PolicyEval {
    let n = batch.len() as f64;
    let mut grads = Gradients::zeros_like(policy);
    let (mut objective, mut entropy_sum, mut max_dev, mut clipped) = (0.0, 0.0, 0.0f64, 0usize);
    for ((t, &w), input) in batch.transitions.iter().zip(&batch.weights).zip(inputs) {
        let cache = policy.forward(input);
        let tm = term(
            cache.output(),
            t.action_index,
            w,
            t.log_prob_at_collection,
            surrogate,
            beta,
            1.0 / n,
        );
        policy.backward(&cache, &tm.d_logits, &mut grads);
        objective += tm.value;
        entropy_sum += tm.entropy;
        max_dev = max_dev.max((tm.ratio - 1.0).abs());
        clipped += tm.clipped as usize;
    }
    PolicyEval {
        objective: objective / n,
        grads,
        mean_entropy: entropy_sum / n,
        max_ratio_deviation: max_dev,
        clip_fraction: clipped as f64 / n,
    }
}

/// Mean squared error against the discounted returns.
pub fn value_loss(value: &Mlp, batch: &Batch) -> f64 {
    let n = batch.len() as f64;
    batch
        .transitions
        .iter()
        .zip(&batch.returns)
        .map(|(t, &g)| (value.forward_value(&t.observation.to_f64()) - g).powi(2))
        .sum::<f64>()
        / n
}

/// Loss and its gradient (descent direction is `-grads`).
pub fn value_gradient(value: &Mlp, batch: &Batch, inputs: &[Vec<f64>]) -> (f64, Gradients) {
    let n = batch.len() as f64;
    let mut grads = Gradients::zeros_like(value);
    let mut loss = 0.0;
    for (input, &g) in inputs.iter().zip(&batch.returns) {
        let cache = value.forward(input);
        let err = cache.output()[0] - g;
        loss += err * err;
        value.backward(&cache, &[2.0 * err / n], &mut grads);
    }
    (loss / n, grads)
}
