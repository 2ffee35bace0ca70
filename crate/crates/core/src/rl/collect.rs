use std::ops::Range;

use rand::Rng;

use super::advantage::{gae, normalize, rewards_to_go};
use super::{AlgoConfig, Algorithm};
use crate::cheat_env::{CheatEnv, EnvAction, Observation, NUM_ACTIONS};
use crate::metrics::EpisodeSummary;
use crate::nn::{entropy, log_softmax, Mlp};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub observation: Observation,
    pub action_index: usize,
    pub reward: f64,
    /// `ln π_old(a|s)` from the policy that chose the action.
    pub log_prob_at_collection: f64,
    pub value_estimate: Option<f64>,
    pub episode_id: usize,
    pub step_in_episode: usize,
    /// Full policy distribution at this state, kept for the action profile.
    pub probs: [f64; NUM_ACTIONS],
}

/// Complete episodes plus the per-transition targets used by the updates.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub transitions: Vec<Transition>,
    pub episodes: Vec<Range<usize>>,
    pub summaries: Vec<EpisodeSummary>,
    /// Discounted reward-to-go; the value-net regression target.
    pub returns: Vec<f64>,
    /// GAE advantages; empty when no value estimates were recorded.
    pub advantages: Vec<f64>,
    /// Policy-gradient weight per transition (normalized returns or advantages).
    pub weights: Vec<f64>,
}

impl Batch {
    /// Groups transitions by `episode_id` (which must be contiguous) and fills the targets.
    pub fn from_transitions(
        transitions: Vec<Transition>,
        summaries: Vec<EpisodeSummary>,
        config: &AlgoConfig,
    ) -> Batch {
        let mut episodes = Vec::new();
        let mut start = 0;
        for i in 1..=transitions.len() {
            if i == transitions.len() || transitions[i].episode_id != transitions[start].episode_id {
                episodes.push(start..i);
                start = i;
            }
        }
        let mut batch = Batch {
            transitions,
            episodes,
            summaries,
            returns: Vec::new(),
            advantages: Vec::new(),
            weights: Vec::new(),
        };
        batch.compute_targets(config);
        batch
    }

    pub fn compute_targets(&mut self, config: &AlgoConfig) {
        let n = self.transitions.len();
        let mut returns = Vec::with_capacity(n);
        let mut advantages = Vec::with_capacity(n);
        let has_values = self
            .transitions
            .iter()
            .all(|t| t.value_estimate.is_some());
        for range in &self.episodes {
            let ep = &self.transitions[range.clone()];
            let rewards: Vec<f64> = ep.iter().map(|t| t.reward).collect();
            returns.extend(rewards_to_go(&rewards, config.gamma));
            if has_values && n > 0 {
                let values: Vec<f64> = ep.iter().map(|t| t.value_estimate.unwrap()).collect();
                advantages.extend(gae(&rewards, &values, config.gamma, config.lambda));
            }
        }
        let raw = match config.algorithm {
            Algorithm::Spg => &returns,
            Algorithm::Vpg | Algorithm::Ppo => {
                assert!(has_values, "value-based learners need value estimates");
                &advantages
            }
        };
        self.weights = if config.normalize_targets {
            normalize(raw)
        } else {
            raw.clone()
        };
        self.returns = returns;
        self.advantages = advantages;
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn inputs(&self) -> Vec<Vec<f64>> {
        self.transitions.iter().map(|t| t.observation.to_f64()).collect()
    }

    pub fn state_probs(&self) -> Vec<[f64; NUM_ACTIONS]> {
        self.transitions.iter().map(|t| t.probs).collect()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.transitions.iter().map(|t| entropy(&t.probs)).collect()
    }
}

/// Inverse-CDF draw from a discrete distribution.
pub fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1)
}

/// Self-play until at least `min_steps` transitions are stored and the running
/// episode has finished. Both seats share `policy`.
pub fn collect_batch(
    env: &mut CheatEnv,
    policy: &Mlp,
    value: Option<&Mlp>,
    min_steps: usize,
    config: &AlgoConfig,
    rng: &mut impl Rng,
) -> Batch {
    let mut transitions = Vec::with_capacity(min_steps + 100);
    let mut summaries = Vec::new();
    let mut episode_id = 0;
    while transitions.len() < min_steps || episode_id == 0 {
        let mut obs = env.reset(rng.gen());
        let mut step = 0;
        loop {
            let input = obs.to_f64();
            let logits = policy.forward(&input).output().to_vec();
            let log_probs = log_softmax(&logits);
            let mut probs = [0.0; NUM_ACTIONS];
            for (p, lp) in probs.iter_mut().zip(&log_probs) {
                *p = lp.exp();
            }
            let value_estimate = value.map(|v| v.forward_value(&input));
            let action = sample_index(&probs, rng);
            let result = env
                .step(EnvAction::new(action).expect("policy has eleven outputs"), rng)
                .expect("episode is running");
            transitions.push(Transition {
                observation: obs,
                action_index: action,
                reward: result.reward,
                log_prob_at_collection: log_probs[action],
                value_estimate,
                episode_id,
                step_in_episode: step,
                probs,
            });
            step += 1;
            obs = result.observation;
            if result.done {
                break;
            }
        }
        summaries.push(EpisodeSummary::from_final_state(env.state()));
        episode_id += 1;
    }
    Batch::from_transitions(transitions, summaries, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheat_env::OBS_LEN;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small_nets(seed: u64) -> (Mlp, Mlp) {
        (
            Mlp::init(&[OBS_LEN, 16, 8, NUM_ACTIONS], crate::nn::HeadKind::SoftmaxPolicy, seed),
            Mlp::init(&[OBS_LEN, 8, 1], crate::nn::HeadKind::ScalarValue, seed + 1),
        )
    }

    #[test]
    fn batch_size_and_boundaries() {
        let (policy, value) = small_nets(1);
        let config = AlgoConfig::defaults_for(Algorithm::Vpg);
        let mut env = CheatEnv::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let batch = collect_batch(&mut env, &policy, Some(&value), 1000, &config, &mut rng);
        assert!((1000..=1088).contains(&batch.len()));
        assert_eq!(batch.episodes.len(), batch.summaries.len());
        assert!(batch.episodes.len() >= 10);
        assert_eq!(batch.episodes.last().unwrap().end, batch.len());
        for (id, range) in batch.episodes.iter().enumerate() {
            for (k, t) in batch.transitions[range.clone()].iter().enumerate() {
                assert_eq!((t.episode_id, t.step_in_episode), (id, k));
            }
            assert_eq!(range.len() as u32, batch.summaries[id].turns);
        }
        for t in &batch.transitions[..50] {
            let p = policy.forward_policy(&t.observation.to_f64());
            assert!((p[t.action_index].ln() - t.log_prob_at_collection).abs() < 1e-12);
            assert!((t.value_estimate.unwrap() - value.forward_value(&t.observation.to_f64())).abs() < 1e-12);
            assert!((t.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        let n = batch.len() as f64;
        let mean = batch.weights.iter().sum::<f64>() / n;
        let std = (batch.weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-6 && (std - 1.0).abs() < 1e-6);
    }

    #[test]
    fn seeded_collection_is_deterministic() {
        let (policy, _) = small_nets(3);
        let config = AlgoConfig::defaults_for(Algorithm::Spg);
        let run = || {
            let mut env = CheatEnv::default();
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            collect_batch(&mut env, &policy, None, 300, &config, &mut rng)
        };
        assert_eq!(run(), run());
        assert!(run().advantages.is_empty());
    }

    #[test]
    fn sampling_follows_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let probs = [0.0, 0.25, 0.75];
        let mut counts = [0usize; 3];
        for _ in 0..40_000 {
            counts[sample_index(&probs, &mut rng)] += 1;
        }
        assert_eq!(counts[0], 0);
        assert!((counts[1] as f64 / 40_000.0 - 0.25).abs() < 0.01);
    }
}
