use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::checkpoint::Checkpoint;
use super::collect::{collect_batch, Batch};
use super::update::{ppo_update, spg_update, vpg_update, UpdateStats};
use super::{AlgoConfig, Algorithm, RlError};
use crate::cheat_env::{CheatEnv, RewardTable, NUM_ACTIONS, OBS_LEN};
use crate::metrics::{aggregate_epoch, EpochMetrics};
use crate::nn::{AdamState, Mlp};

pub const EPOCH_CSV_HEADER: &str = "epoch,env_steps,episodes,mean_score,mean_fireworks,mean_lives_left,mean_entropy,play_bias,discard_bias,value_loss,policy_objective";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub algo: AlgoConfig,
    pub seed: u64,
    pub batch_min_steps: usize,
    pub rewards: RewardTable,
}

impl TrainerConfig {
    pub fn defaults_for(algorithm: Algorithm, seed: u64) -> Self {
        Self {
            algo: AlgoConfig::defaults_for(algorithm),
            seed,
            batch_min_steps: 1000,
            rewards: RewardTable::default(),
        }
    }
}

/// One metrics row. Bias and value-loss cells are empty when undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: u64,
    pub env_steps: usize,
    pub metrics: EpochMetrics,
    pub value_loss: Option<f64>,
    pub policy_objective: f64,
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

impl EpochRecord {
    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{},{},{},{:.6}",
            self.epoch,
            self.env_steps,
            m.episodes,
            m.mean_score,
            m.mean_fireworks,
            m.mean_lives_left,
            m.mean_entropy,
            cell(m.play_bias),
            cell(m.discard_bias),
            cell(self.value_loss),
            self.policy_objective,
        )
    }
}

/// Owns the networks, optimizers, environment and RNG of a single-worker run.
#[derive(Debug, Clone)]
pub struct Trainer {
    config: TrainerConfig,
    policy: Mlp,
    policy_adam: AdamState,
    value: Option<(Mlp, AdamState)>,
    env: CheatEnv,
    rng: ChaCha8Rng,
    epoch: u64,
}

impl Trainer {
    pub fn new(config: TrainerConfig) -> Result<Self, RlError> {
        config.algo.validate()?;
        if config.batch_min_steps == 0 {
            return Err(RlError::InvalidConfig("batch_min_steps must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let policy = Mlp::policy(OBS_LEN, NUM_ACTIONS, rng.gen());
        let value_seed: u64 = rng.gen();
        let value = config.algo.algorithm.uses_value_net().then(|| {
            let net = Mlp::value(OBS_LEN, value_seed);
            let adam = AdamState::new(&net, config.algo.adam);
            (net, adam)
        });
        Ok(Self {
            policy_adam: AdamState::new(&policy, config.algo.adam),
            policy,
            value,
            env: CheatEnv::new(config.rewards),
            rng,
            epoch: 0,
            config,
        })
    }

    pub fn config(&self) -> &TrainerConfig {
        &self.config
    }

    pub fn policy(&self) -> &Mlp {
        &self.policy
    }

    pub fn value(&self) -> Option<&Mlp> {
        self.value.as_ref().map(|(net, _)| net)
    }

    pub fn epochs_done(&self) -> u64 {
        self.epoch
    }

    pub fn collect(&mut self) -> Batch {
        collect_batch(
            &mut self.env,
            &self.policy,
            self.value.as_ref().map(|(net, _)| net),
            self.config.batch_min_steps,
            &self.config.algo,
            &mut self.rng,
        )
    }

    pub fn update(&mut self, batch: &Batch) -> UpdateStats {
        let algo = &self.config.algo;
        match (algo.algorithm, self.value.as_mut()) {
            (Algorithm::Spg, _) => spg_update(batch, &mut self.policy, &mut self.policy_adam, algo),
            (Algorithm::Vpg, Some((v, va))) => {
                vpg_update(batch, &mut self.policy, &mut self.policy_adam, v, va, algo)
            }
            (Algorithm::Ppo, Some((v, va))) => {
                ppo_update(batch, &mut self.policy, &mut self.policy_adam, v, va, algo)
            }
            _ => unreachable!("value learners are built with a value net"),
        }
    }

    /// Collect one batch, update once, and report the epoch's metrics.
    pub fn run_epoch(&mut self) -> EpochRecord {
        let batch = self.collect();
        let metrics = aggregate_epoch(&batch.summaries, &batch.state_probs(), &batch.entropies());
        let stats = self.update(&batch);
        self.epoch += 1;
        EpochRecord {
            epoch: self.epoch,
            env_steps: batch.len(),
            metrics,
            value_loss: stats.value_loss,
            policy_objective: stats.policy_objective,
        }
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            algorithm: self.config.algo.algorithm,
            epoch: self.epoch,
            seed: self.config.seed,
            policy: self.policy.clone(),
            policy_adam: self.policy_adam.clone(),
            value: self.value.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_runs_are_reproducible() {
        for algorithm in Algorithm::ALL {
            let mut config = TrainerConfig::defaults_for(algorithm, 11);
            config.batch_min_steps = 150;
            let rows = || {
                let mut t = Trainer::new(config).unwrap();
                (0..2).map(|_| t.run_epoch().to_csv()).collect::<Vec<_>>()
            };
            let a = rows();
            assert_eq!(a, rows());
            assert_eq!(a[0].split(',').count(), EPOCH_CSV_HEADER.split(',').count());
            assert!(a[1].starts_with("2,"));
            let value_cell = a[0].split(',').nth(9).unwrap();
            assert_eq!(value_cell.is_empty(), algorithm == Algorithm::Spg);
        }
    }

    #[test]
    fn initial_entropy_near_uniform() {
        let mut config = TrainerConfig::defaults_for(Algorithm::Vpg, 0);
        config.batch_min_steps = 100;
        let mut t = Trainer::new(config).unwrap();
        let record = t.run_epoch();
        assert!((record.metrics.mean_entropy - (NUM_ACTIONS as f64).ln()).abs() < 0.05);
    }
}
