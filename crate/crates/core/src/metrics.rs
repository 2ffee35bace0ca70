//! Episode summaries, averaged action profiles, and positional bias.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cheat_env::{HAND_SLOTS, NUM_ACTIONS};
use crate::engine::{GameState, GameTrace, Status};
use crate::nn::entropy;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("action subset carries no probability mass")]
    DegenerateSubset,
    #[error("action subset is empty")]
    EmptySubset,
}

pub const PLAY_SLOTS: [usize; HAND_SLOTS] = [0, 1, 2, 3, 4];
pub const DISCARD_SLOTS: [usize; HAND_SLOTS] = [5, 6, 7, 8, 9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSummary {
    pub score: u32,
    /// Successful plays, kept even when every life is lost.
    pub fireworks_total: u32,
    pub lives_left: u8,
    pub turns: u32,
    pub perfect: bool,
}

impl EpisodeSummary {
    /// Firework heights only ever grow, so their sum equals the successful play count.
    pub fn from_final_state(state: &GameState) -> Self {
        Self {
            score: state.score(),
            fireworks_total: state.fireworks_total(),
            lives_left: state.life_tokens(),
            turns: state.turns_taken(),
            perfect: state.status() == Status::PerfectWin,
        }
    }
}

pub fn summarize_episode(trace: &GameTrace) -> EpisodeSummary {
    let successful = trace
        .turns()
        .iter()
        .filter(|t| t.outcome.was_successful_play)
        .count() as u32;
    let end = trace.final_state();
    let lives_left = end.life_tokens();
    EpisodeSummary {
        score: if lives_left > 0 { successful } else { 0 },
        fireworks_total: successful,
        lives_left,
        turns: trace.len() as u32,
        perfect: successful == 25 && lives_left > 0,
    }
}

/// Mean policy output over a set of visited states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionProbProfile {
    pub p: [f64; NUM_ACTIONS],
}

impl ActionProbProfile {
    pub fn uniform() -> Self {
        Self {
            p: [1.0 / NUM_ACTIONS as f64; NUM_ACTIONS],
        }
    }

    pub fn mean_of(distributions: &[[f64; NUM_ACTIONS]]) -> Self {
        let mut p = [0.0; NUM_ACTIONS];
        for d in distributions {
            for (acc, x) in p.iter_mut().zip(d) {
                *acc += x;
            }
        }
        let n = distributions.len().max(1) as f64;
        p.iter_mut().for_each(|x| *x /= n);
        Self { p }
    }

    /// Total probability on the five play actions, the five discards, and the hint.
    pub fn grouped(&self) -> (f64, f64, f64) {
        let play = PLAY_SLOTS.iter().map(|&i| self.p[i]).sum();
        let discard = DISCARD_SLOTS.iter().map(|&i| self.p[i]).sum();
        (play, discard, self.p[NUM_ACTIONS - 1])
    }
}

/// Largest pairwise gap within `subset`, divided by the subset's total mass.
pub fn positional_bias(profile: &ActionProbProfile, subset: &[usize]) -> Result<f64, MetricsError> {
    if subset.is_empty() {
        return Err(MetricsError::EmptySubset);
    }
    let probs: Vec<f64> = subset.iter().map(|&i| profile.p[i]).collect();
    let mass: f64 = probs.iter().sum();
    if mass <= 0.0 {
        return Err(MetricsError::DegenerateSubset);
    }
    let max = probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((max - min) / mass)
}

/// Per-epoch aggregates. Bias fields are `None` when the subset had no mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub episodes: usize,
    pub mean_score: f64,
    pub mean_fireworks: f64,
    pub mean_lives_left: f64,
    pub mean_turns: f64,
    pub mean_entropy: f64,
    pub play_bias: Option<f64>,
    pub discard_bias: Option<f64>,
    pub profile: ActionProbProfile,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// `state_probs` are the policy distributions at every visited state; `entropies` their entropies.
pub fn aggregate_epoch(
    summaries: &[EpisodeSummary],
    state_probs: &[[f64; NUM_ACTIONS]],
    entropies: &[f64],
) -> EpochMetrics {
    let profile = ActionProbProfile::mean_of(state_probs);
    EpochMetrics {
        episodes: summaries.len(),
        mean_score: mean(summaries.iter().map(|s| s.score as f64)),
        mean_fireworks: mean(summaries.iter().map(|s| s.fireworks_total as f64)),
        mean_lives_left: mean(summaries.iter().map(|s| s.lives_left as f64)),
        mean_turns: mean(summaries.iter().map(|s| s.turns as f64)),
        mean_entropy: mean(entropies.iter().copied()),
        play_bias: positional_bias(&profile, &PLAY_SLOTS).ok(),
        discard_bias: positional_bias(&profile, &DISCARD_SLOTS).ok(),
        profile,
    }
}

/// Entropy of each distribution, for callers that only hold probabilities.
pub fn entropies_of(state_probs: &[[f64; NUM_ACTIONS]]) -> Vec<f64> {
    state_probs.iter().map(|p| entropy(p)).collect()
}

/// Sample mean and standard error of the mean (`s / sqrt(n)` with the `n - 1` estimator).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let m = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (m, 0.0);
    }
    let var = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (m, (var / n as f64).sqrt())
}

/// Final evaluation over many test games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_games: usize,
    pub seed: u64,
    pub greedy: bool,
    pub mean_score: f64,
    pub score_stderr: f64,
    pub perfect_pct: f64,
    pub mean_fireworks: f64,
    pub mean_lives_left: f64,
    pub mean_turns: f64,
    pub max_turns: u32,
    pub zero_score_games: usize,
    pub play_bias: Option<f64>,
    pub discard_bias: Option<f64>,
    pub profile: ActionProbProfile,
}

impl EvalReport {
    pub fn from_games(
        summaries: &[EpisodeSummary],
        state_probs: &[[f64; NUM_ACTIONS]],
        seed: u64,
        greedy: bool,
    ) -> Self {
        let scores: Vec<f64> = summaries.iter().map(|s| s.score as f64).collect();
        let (mean_score, score_stderr) = mean_and_stderr(&scores);
        let agg = aggregate_epoch(summaries, state_probs, &[]);
        let n = summaries.len();
        Self {
            n_games: n,
            seed,
            greedy,
            mean_score,
            score_stderr,
            perfect_pct: 100.0 * summaries.iter().filter(|s| s.perfect).count() as f64
                / n.max(1) as f64,
            mean_fireworks: agg.mean_fireworks,
            mean_lives_left: agg.mean_lives_left,
            mean_turns: agg.mean_turns,
            max_turns: summaries.iter().map(|s| s.turns).max().unwrap_or(0),
            zero_score_games: summaries.iter().filter(|s| s.score == 0).count(),
            play_bias: agg.play_bias,
            discard_bias: agg.discard_bias,
            profile: agg.profile,
        }
    }

    /// `23.72 ± 0.04` style summary line.
    pub fn headline(&self) -> String {
        format!(
            "n_games={} score={:.2} ± {:.2} perfect={:.1}%",
            self.n_games, self.mean_score, self.score_stderr, self.perfect_pct
        )
    }
}
