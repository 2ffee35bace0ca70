//! Batch collection and the three policy-gradient learners.
//!
//! * SPG weights `log π(a|s)` by the normalized reward-to-go.
//! * VPG weights it by normalized GAE advantages and fits a value net.
//! * PPO replaces the log-probability with the clipped ratio surrogate and
//!   runs several policy iterations per batch.
//!
//! Every objective is a mean over the batch plus `β · H(π(·|s))`.

mod advantage;
mod checkpoint;
mod collect;
mod evaluate;
mod objective;
mod trainer;
mod update;

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cheat_env::EnvError;
use crate::nn::{AdamConfig, NnError};

pub use advantage::{clip, gae, normalize, rewards_to_go};
pub use checkpoint::{Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use collect::{collect_batch, sample_index, Batch, Transition};
pub use evaluate::{evaluate_policy, EvalGames};
pub use objective::{
    policy_gradient, policy_objective, value_gradient, value_loss, PolicyEval, Surrogate,
};
pub use trainer::{EpochRecord, Trainer, TrainerConfig, EPOCH_CSV_HEADER};
pub use update::{ppo_update, spg_update, vpg_update, UpdateStats};

#[derive(Debug, Error)]
pub enum RlError {
    #[error("unknown algorithm `{0}` (expected spg, vpg or ppo)")]
    UnknownAlgorithm(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("not a checkpoint file")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    BadVersion(u32),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Spg,
    Vpg,
    Ppo,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Spg, Algorithm::Vpg, Algorithm::Ppo];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Spg => "spg",
            Algorithm::Vpg => "vpg",
            Algorithm::Ppo => "ppo",
        }
    }

    pub fn uses_value_net(self) -> bool {
        !matches!(self, Algorithm::Spg)
    }

    fn tag(self) -> u32 {
        match self {
            Algorithm::Spg => 0,
            Algorithm::Vpg => 1,
            Algorithm::Ppo => 2,
        }
    }

    fn from_tag(tag: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.tag() == tag)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = RlError;

    fn from_str(s: &str) -> Result<Self, RlError> {
        match s.to_ascii_lowercase().as_str() {
            "spg" => Ok(Algorithm::Spg),
            "vpg" => Ok(Algorithm::Vpg),
            "ppo" => Ok(Algorithm::Ppo),
            _ => Err(RlError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Learner hyperparameters. [`AlgoConfig::defaults_for`] gives the training settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoConfig {
    pub algorithm: Algorithm,
    pub gamma: f64,
    pub lambda: f64,
    pub clip_epsilon: f64,
    pub entropy_coef: f64,
    pub policy_iters: u32,
    /// Zero for SPG, which has no value net.
    pub value_iters: u32,
    pub policy_lr: f64,
    pub value_lr: f64,
    pub normalize_targets: bool,
    pub adam: AdamConfig,
}

impl AlgoConfig {
    pub fn defaults_for(algorithm: Algorithm) -> Self {
        let (policy_iters, value_iters) = match algorithm {
            Algorithm::Spg => (1, 0),
            Algorithm::Vpg => (1, 5),
            Algorithm::Ppo => (5, 5),
        };
        Self {
            algorithm,
            gamma: 0.99,
            lambda: 0.95,
            clip_epsilon: 0.2,
            entropy_coef: 0.01,
            policy_iters,
            value_iters,
            policy_lr: 3e-4,
            value_lr: 3e-4,
            normalize_targets: true,
            adam: AdamConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), RlError> {
        let unit = |name: &str, x: f64| {
            if (0.0..=1.0).contains(&x) {
                Ok(())
            } else {
                Err(RlError::InvalidConfig(format!("{name} must lie in [0, 1], got {x}")))
            }
        };
        unit("gamma", self.gamma)?;
        unit("lambda", self.lambda)?;
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return Err(RlError::InvalidConfig("clip_epsilon must lie in (0, 1)".into()));
        }
        if !(self.entropy_coef >= 0.0 && self.entropy_coef.is_finite()) {
            return Err(RlError::InvalidConfig("entropy_coef must be non-negative".into()));
        }
        if self.policy_iters == 0 {
            return Err(RlError::InvalidConfig("policy_iters must be at least 1".into()));
        }
        if self.algorithm.uses_value_net() && self.value_iters == 0 {
            return Err(RlError::InvalidConfig("value_iters must be at least 1".into()));
        }
        if !(self.policy_lr > 0.0 && self.value_lr > 0.0) {
            return Err(RlError::InvalidConfig("learning rates must be positive".into()));
        }
        Ok(())
    }

    pub fn surrogate(&self) -> Surrogate {
        match self.algorithm {
            Algorithm::Ppo => Surrogate::Clipped {
                epsilon: self.clip_epsilon,
            },
            _ => Surrogate::LogProb,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let spg = AlgoConfig::defaults_for(Algorithm::Spg);
        let vpg = AlgoConfig::defaults_for(Algorithm::Vpg);
        let ppo = AlgoConfig::defaults_for(Algorithm::Ppo);
        for c in [spg, vpg, ppo] {
            assert_eq!((c.gamma, c.lambda, c.clip_epsilon, c.entropy_coef), (0.99, 0.95, 0.2, 0.01));
            assert_eq!((c.policy_lr, c.value_lr), (3e-4, 3e-4));
            c.validate().unwrap();
        }
        assert_eq!((spg.policy_iters, spg.value_iters), (1, 0));
        assert_eq!((vpg.policy_iters, vpg.value_iters), (1, 5));
        assert_eq!((ppo.policy_iters, ppo.value_iters), (5, 5));
    }

    #[test]
    fn parse_names() {
        assert_eq!("PPO".parse::<Algorithm>().unwrap(), Algorithm::Ppo);
        assert!(matches!("a2c".parse::<Algorithm>(), Err(RlError::UnknownAlgorithm(_))));
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_tag(a.tag()), Some(a));
        }
    }

    #[test]
    fn validation_rejects() {
        let mut c = AlgoConfig::defaults_for(Algorithm::Vpg);
        c.value_iters = 0;
        assert!(c.validate().is_err());
        let mut c = AlgoConfig::defaults_for(Algorithm::Ppo);
        c.gamma = 1.5;
        assert!(c.validate().is_err());
    }
}
