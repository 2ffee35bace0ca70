use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::cheat_env::RewardTable;
use crate::rl::{AlgoConfig, Algorithm, TrainerConfig};

/// Environment variable naming the root directory for run outputs.
pub const OUT_DIR_ENV: &str = "HANABI_OUT_DIR";
pub const DEFAULT_OUT_ROOT: &str = "runs";

/// Learner fields a config file or flag may override; `None` keeps the default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgoOverrides {
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub clip_epsilon: Option<f64>,
    pub entropy_coef: Option<f64>,
    pub policy_iters: Option<u32>,
    pub value_iters: Option<u32>,
    pub policy_lr: Option<f64>,
    pub value_lr: Option<f64>,
    pub normalize_targets: Option<bool>,
}

impl AlgoOverrides {
    /// Flag values win over file values.
    pub fn merged_with(self, flags: AlgoOverrides) -> AlgoOverrides {
        AlgoOverrides {
            gamma: flags.gamma.or(self.gamma),
            lambda: flags.lambda.or(self.lambda),
            clip_epsilon: flags.clip_epsilon.or(self.clip_epsilon),
            entropy_coef: flags.entropy_coef.or(self.entropy_coef),
            policy_iters: flags.policy_iters.or(self.policy_iters),
            value_iters: flags.value_iters.or(self.value_iters),
            policy_lr: flags.policy_lr.or(self.policy_lr),
            value_lr: flags.value_lr.or(self.value_lr),
            normalize_targets: flags.normalize_targets.or(self.normalize_targets),
        }
    }

    pub fn apply(&self, mut base: AlgoConfig) -> AlgoConfig {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { base.$f = v; } )* };
        }
        set!(gamma, lambda, clip_epsilon, entropy_coef, policy_iters, value_iters, policy_lr, value_lr, normalize_targets);
        base
    }
}

/// Training run description as read from TOML. Every field is optional in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub epochs: u64,
    pub batch_min_steps: usize,
    /// Write a checkpoint every this many epochs; 0 writes only the final one.
    pub checkpoint_every: u64,
    pub output_dir: Option<PathBuf>,
    pub algo: AlgoOverrides,
    pub rewards: RewardTable,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Vpg,
            seed: 1,
            epochs: 200,
            batch_min_steps: 1000,
            checkpoint_every: 50,
            output_dir: None,
            algo: AlgoOverrides::default(),
            rewards: RewardTable::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn algo_config(&self) -> AlgoConfig {
        self.algo.apply(AlgoConfig::defaults_for(self.algorithm))
    }

    pub fn trainer_config(&self) -> Result<TrainerConfig, CliError> {
        let algo = self.algo_config();
        algo.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        if self.batch_min_steps == 0 {
            return Err(CliError::Validation("batch_min_steps must be positive".into()));
        }
        Ok(TrainerConfig {
            algo,
            seed: self.seed,
            batch_min_steps: self.batch_min_steps,
            rewards: self.rewards,
        })
    }

    /// `output_dir` if set, else `$HANABI_OUT_DIR/<algo>-seed<seed>`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| {
            out_root().join(format!("{}-seed{}", self.algorithm, self.seed))
        })
    }
}

pub fn out_root() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT))
}
