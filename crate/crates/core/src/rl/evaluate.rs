use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::collect::sample_index;
use crate::cheat_env::{CheatEnv, EnvAction, RewardTable, NUM_ACTIONS};
use crate::metrics::EpisodeSummary;
use crate::nn::Mlp;

/// Results of playing `n` test games with a fixed policy.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGames {
    pub summaries: Vec<EpisodeSummary>,
    pub state_probs: Vec<[f64; NUM_ACTIONS]>,
    pub total_reward: f64,
}

/// Plays `n_games` self-play games without learning. `greedy` picks the arg-max
/// action instead of sampling.
pub fn evaluate_policy(
    policy: &Mlp,
    n_games: usize,
    seed: u64,
    greedy: bool,
    rewards: RewardTable,
) -> EvalGames {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = CheatEnv::new(rewards);
    let mut out = EvalGames {
        summaries: Vec::with_capacity(n_games),
        state_probs: Vec::new(),
        total_reward: 0.0,
    };
    for _ in 0..n_games {
        let mut obs = env.reset(rng.gen());
        loop {
            let probs_vec = policy.forward_policy(&obs.to_f64());
            let mut probs = [0.0; NUM_ACTIONS];
            probs.copy_from_slice(&probs_vec);
            let action = if greedy {
                // first maximum wins ties
                (0..NUM_ACTIONS).fold(0, |best, i| if probs[i] > probs[best] { i } else { best })
            } else {
                sample_index(&probs, &mut rng)
            };
            out.state_probs.push(probs);
            let step = env
                .step(EnvAction::new(action).expect("eleven outputs"), &mut rng)
                .expect("episode is running");
            out.total_reward += step.reward;
            obs = step.observation;
            if step.done {
                break;
            }
        }
        out.summaries.push(EpisodeSummary::from_final_state(env.state()));
    }
    out
}
