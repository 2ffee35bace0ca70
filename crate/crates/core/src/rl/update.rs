use super::collect::Batch;
use super::objective::{policy_gradient, value_gradient, Surrogate};
use super::AlgoConfig;
use crate::nn::{AdamState, Mlp};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UpdateStats {
    /// Objective on the batch before any step this epoch.
    pub policy_objective: f64,
    /// Mean entropy of the policy at batch states, before the update.
    pub mean_entropy: f64,
    /// Objective value seen at the start of each policy iteration.
    pub policy_objectives: Vec<f64>,
    /// `max |r - 1|` during the first policy iteration.
    pub first_iter_max_ratio_deviation: f64,
    pub last_clip_fraction: f64,
    /// Value loss before the first value step, if a value net exists.
    pub value_loss: Option<f64>,
    /// Loss seen at the start of each value iteration.
    pub value_losses: Vec<f64>,
}

fn policy_steps(
    batch: &Batch,
    inputs: &[Vec<f64>],
    policy: &mut Mlp,
    adam: &mut AdamState,
    config: &AlgoConfig,
    surrogate: Surrogate,
    stats: &mut UpdateStats,
) {
    for i in 0..config.policy_iters {
        let mut eval = policy_gradient(policy, batch, inputs, surrogate, config.entropy_coef);
        if i == 0 {
            stats.policy_objective = eval.objective;
            stats.mean_entropy = eval.mean_entropy;
            stats.first_iter_max_ratio_deviation = eval.max_ratio_deviation;
        }
        stats.policy_objectives.push(eval.objective);
        stats.last_clip_fraction = eval.clip_fraction;
        eval.grads.scale(-1.0);
        adam.step(policy, &eval.grads, config.policy_lr);
    }
}

fn value_steps(
    batch: &Batch,
    inputs: &[Vec<f64>],
    value: &mut Mlp,
    adam: &mut AdamState,
    config: &AlgoConfig,
    stats: &mut UpdateStats,
) {
    for _ in 0..config.value_iters {
        let (loss, grads) = value_gradient(value, batch, inputs);
        stats.value_losses.push(loss);
        adam.step(value, &grads, config.value_lr);
    }
    stats.value_loss = stats.value_losses.first().copied();
}

/// One ascent step on the return-weighted log-likelihood plus entropy bonus.
pub fn spg_update(
    batch: &Batch,
    policy: &mut Mlp,
    policy_adam: &mut AdamState,
    config: &AlgoConfig,
) -> UpdateStats {
    let inputs = batch.inputs();
    let mut stats = UpdateStats::default();
    policy_steps(
        batch,
        &inputs,
        policy,
        policy_adam,
        config,
        Surrogate::LogProb,
        &mut stats,
    );
    stats
}

/// Advantage-weighted policy step, then value regression onto the returns.
pub fn vpg_update(
    batch: &Batch,
    policy: &mut Mlp,
    policy_adam: &mut AdamState,
    value: &mut Mlp,
    value_adam: &mut AdamState,
    config: &AlgoConfig,
) -> UpdateStats {
    let inputs = batch.inputs();
    let mut stats = UpdateStats::default();
    policy_steps(
        batch,
        &inputs,
        policy,
        policy_adam,
        config,
        Surrogate::LogProb,
        &mut stats,
    );
    value_steps(batch, &inputs, value, value_adam, config, &mut stats);
    stats
}

/// Clipped-surrogate policy iterations against the collection-time policy, then value regression.
pub fn ppo_update(
    batch: &Batch,
    policy: &mut Mlp,
    policy_adam: &mut AdamState,
    value: &mut Mlp,
    value_adam: &mut AdamState,
    config: &AlgoConfig,
) -> UpdateStats {
    let inputs = batch.inputs();
    let mut stats = UpdateStats::default();
    policy_steps(
        batch,
        &inputs,
        policy,
        policy_adam,
        config,
        Surrogate::Clipped {
            epsilon: config.clip_epsilon,
        },
        &mut stats,
    );
    value_steps(batch, &inputs, value, value_adam, config, &mut stats);
    stats
}
