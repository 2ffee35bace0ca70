//! Command implementations behind the `hanabi` binary.
//!
//! Exit codes: 0 success, 1 validation or input error, 2 verification failure.

mod args;
mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cheat_env::{CheatEnv, EnvAction, RewardTable, NUM_ACTIONS, OBS_LEN};
use crate::engine::{format_deck, MAX_PLAYERS, MIN_PLAYERS};
use crate::length_analysis::{
    fuzz_verify, perfect_game_script, perfect_upper_bound, replay_script, sigma0,
    stall_policy_game, FuzzReport,
};
use crate::metrics::EvalReport;
use crate::nn::{max_relative_error, numeric_gradient, HeadKind, Mlp};
use crate::rl::{
    collect_batch, evaluate_policy, policy_gradient, policy_objective, sample_index,
    value_gradient, value_loss, AlgoConfig, Algorithm, Checkpoint, EpochRecord, Trainer,
    EPOCH_CSV_HEADER,
};

pub use args::{run, Cli, Command};
pub use config::{out_root, AlgoOverrides, RunConfig, DEFAULT_OUT_ROOT, OUT_DIR_ENV};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CHECKPOINT_DIR: &str = "checkpoints";
pub const FINAL_CHECKPOINT: &str = "final.ckpt";
/// Window for the trailing means in the run summary.
pub const TRAILING_EPOCHS: usize = 20;
pub const GRAD_CHECK_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 2,
            CliError::Validation(_) | CliError::Io { .. } => 1,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(io_err(format!("cannot create {}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut f = create_file(path)?;
    serde_json::to_writer_pretty(&mut f, value).expect("serializable report");
    writeln!(f).map_err(io_err(path.display().to_string()))
}

fn say(out: &mut dyn Write, line: &str) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(io_err("stdout"))
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub version: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub epochs: u64,
    pub batch_min_steps: usize,
    pub checkpoint_every: u64,
    pub single_worker: bool,
    pub algo: AlgoConfig,
    pub rewards: RewardTable,
    pub csv_columns: Vec<String>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainSummary {
    pub epochs: u64,
    pub env_steps: usize,
    pub last_mean_fireworks: Option<f64>,
    pub trailing_mean_fireworks: Option<f64>,
    pub last_play_bias: Option<f64>,
    pub last_discard_bias: Option<f64>,
    pub trailing_play_bias: Option<f64>,
    pub trailing_discard_bias: Option<f64>,
    pub trailing_window: usize,
}

fn trailing_mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

impl TrainSummary {
    pub fn from_records(records: &[EpochRecord]) -> Self {
        let tail = &records[records.len().saturating_sub(TRAILING_EPOCHS)..];
        let last = records.last();
        Self {
            epochs: records.len() as u64,
            env_steps: records.iter().map(|r| r.env_steps).sum(),
            last_mean_fireworks: last.map(|r| r.metrics.mean_fireworks),
            trailing_mean_fireworks: trailing_mean(tail.iter().map(|r| Some(r.metrics.mean_fireworks))),
            last_play_bias: last.and_then(|r| r.metrics.play_bias),
            last_discard_bias: last.and_then(|r| r.metrics.discard_bias),
            trailing_play_bias: trailing_mean(tail.iter().map(|r| r.metrics.play_bias)),
            trailing_discard_bias: trailing_mean(tail.iter().map(|r| r.metrics.discard_bias)),
            trailing_window: tail.len(),
        }
    }
}

/// Runs `config.epochs` epochs, writing the manifest, one CSV row per epoch,
/// checkpoints at the configured cadence, and a final summary.
pub fn cmd_train(config: &RunConfig, log: &mut dyn Write) -> Result<TrainSummary, CliError> {
    let trainer_config = config.trainer_config()?;
    let dir = config.resolved_output_dir();
    let ck_dir = dir.join(CHECKPOINT_DIR);
    fs::create_dir_all(&ck_dir).map_err(io_err(format!("cannot create {}", ck_dir.display())))?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        algorithm: config.algorithm,
        seed: config.seed,
        epochs: config.epochs,
        batch_min_steps: config.batch_min_steps,
        checkpoint_every: config.checkpoint_every,
        single_worker: true,
        algo: trainer_config.algo,
        rewards: trainer_config.rewards,
        csv_columns: EPOCH_CSV_HEADER.split(',').map(String::from).collect(),
        config: RunConfig {
            output_dir: Some(dir.clone()),
            ..config.clone()
        },
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;

    let csv_path = dir.join(METRICS_FILE);
    let mut csv = create_file(&csv_path)?;
    let csv_err = || io_err(csv_path.display().to_string());
    writeln!(csv, "{EPOCH_CSV_HEADER}").map_err(csv_err())?;

    let mut trainer = Trainer::new(trainer_config).map_err(|e| CliError::Validation(e.to_string()))?;
    let mut records = Vec::with_capacity(config.epochs as usize);
    let report_every = (config.epochs / 10).max(1);
    for _ in 0..config.epochs {
        let record = trainer.run_epoch();
        writeln!(csv, "{}", record.to_csv()).map_err(csv_err())?;
        let epoch = record.epoch;
        if epoch % report_every == 0 || epoch == config.epochs {
            say(
                log,
                &format!(
                    "epoch {epoch}/{} fireworks={:.3} score={:.3} entropy={:.4}",
                    config.epochs,
                    record.metrics.mean_fireworks,
                    record.metrics.mean_score,
                    record.metrics.mean_entropy
                ),
            )?;
        }
        if config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0 {
            save_checkpoint(&trainer, &ck_dir.join(format!("epoch-{epoch:06}.ckpt")))?;
        }
        records.push(record);
    }
    csv.flush().map_err(csv_err())?;
    if config.epochs > 0 {
        save_checkpoint(&trainer, &ck_dir.join(FINAL_CHECKPOINT))?;
    }
    let summary = TrainSummary::from_records(&records);
    write_json(&dir.join(SUMMARY_FILE), &summary)?;
    say(log, &format!("wrote {}", dir.display()))?;
    Ok(summary)
}

fn save_checkpoint(trainer: &Trainer, path: &Path) -> Result<(), CliError> {
    trainer.checkpoint().save(path).map_err(|e| CliError::Io {
        context: format!("cannot write {}", path.display()),
        source: std::io::Error::other(e.to_string()),
    })
}

fn load_checkpoint(path: &Path) -> Result<Checkpoint, CliError> {
    Checkpoint::load(path)
        .map_err(|e| CliError::Validation(format!("cannot load checkpoint {}: {e}", path.display())))
}

pub fn cmd_eval(
    checkpoint: &Path,
    n_games: usize,
    seed: u64,
    greedy: bool,
    report_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<EvalReport, CliError> {
    if n_games == 0 {
        return Err(CliError::Validation("n_games must be at least 1".into()));
    }
    let ck = load_checkpoint(checkpoint)?;
    let games = evaluate_policy(&ck.policy, n_games, seed, greedy, RewardTable::default());
    let report = EvalReport::from_games(&games.summaries, &games.state_probs, seed, greedy);
    match report_path {
        Some(p) => write_json(p, &report)?,
        None => say(out, &serde_json::to_string_pretty(&report).expect("serializable"))?,
    }
    say(out, &report.headline())?;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VerifyMode {
    Length,
    Perfect,
    Table6,
}

fn player_list(players: Option<usize>) -> Result<Vec<usize>, CliError> {
    match players {
        None => Ok((MIN_PLAYERS..=MAX_PLAYERS).collect()),
        Some(p) if (MIN_PLAYERS..=MAX_PLAYERS).contains(&p) => Ok(vec![p]),
        Some(p) => Err(CliError::Validation(format!("players must be in 2..=5, got {p}"))),
    }
}

fn fuzz(players: usize, games: usize, seed: u64) -> Result<FuzzReport, CliError> {
    fuzz_verify(players, games, seed).map_err(|e| CliError::Validation(e.to_string()))
}

/// Prints one line per check; files for `perfect` go to `out_dir`.
pub fn cmd_verify(
    mode: VerifyMode,
    players: Option<usize>,
    games: usize,
    seed: u64,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut failures = Vec::new();
    match mode {
        VerifyMode::Length => {
            for p in player_list(players)? {
                let s0 = sigma0(p).expect("valid player count");
                let stall = stall_policy_game(p, seed).map_err(|e| CliError::Validation(e.to_string()))?;
                let achieved = stall.len() as u32;
                let report = fuzz(p, games, seed)?;
                let ok = achieved == s0 && report.ok();
                say(
                    out,
                    &format!("p={p} sigma0={s0} achieved={achieved} ok={ok} fuzz_games={} fuzz_max_turns={}", report.games, report.max_turns),
                )?;
                if !ok {
                    failures.push(format!("p={p}: {report:?}"));
                }
            }
        }
        VerifyMode::Perfect => {
            if players.is_some_and(|p| p != 2) {
                return Err(CliError::Validation("the perfect-game script is for 2 players".into()));
            }
            let script = perfect_game_script();
            let trace = replay_script(&script.deck, &script.actions)
                .map_err(|e| CliError::Verification(e.to_string()))?;
            let turns = trace.len();
            let score = trace.final_state().score();
            let bound = perfect_upper_bound(2).expect("two players");
            let ok = turns as u32 == bound && score == 25;
            fs::create_dir_all(out_dir).map_err(io_err(format!("cannot create {}", out_dir.display())))?;
            let deck_path = out_dir.join("perfect.deck");
            fs::write(&deck_path, format_deck(&script.deck)).map_err(io_err(deck_path.display().to_string()))?;
            let actions_path = out_dir.join("perfect.actions");
            let text: String = trace.actions().iter().map(|a| format!("{a}\n")).collect();
            fs::write(&actions_path, text).map_err(io_err(actions_path.display().to_string()))?;
            say(out, &format!("turns={turns} score={score} ok={ok}"))?;
            say(out, &format!("deck={} actions={}", deck_path.display(), actions_path.display()))?;
            if !ok {
                failures.push(format!("replay gave {turns} turns, score {score}"));
            }
        }
        VerifyMode::Table6 => {
            for p in player_list(players)? {
                let report = fuzz(p, games, seed)?;
                let ok = report.table_mismatches == 0 && report.ok();
                say(
                    out,
                    &format!(
                        "p={p} games={} turns={} mismatches={} ok={ok}",
                        report.games, report.total_turns, report.table_mismatches
                    ),
                )?;
                if !ok {
                    failures.push(format!(
                        "p={p}: {}",
                        report.first_failure.clone().unwrap_or_else(|| format!("{report:?}"))
                    ));
                }
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failures.join("; ")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckLine {
    pub objective: String,
    pub batches: usize,
    pub max_relative_error: f64,
}

/// Central-difference check of every objective on small networks and short real batches.
pub fn grad_check(seed: u64, batches: usize) -> Vec<GradCheckLine> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    for _ in 0..batches {
        for (k, algorithm) in Algorithm::ALL.into_iter().enumerate() {
            let config = AlgoConfig::defaults_for(algorithm);
            let collector = Mlp::init(&[OBS_LEN, 16, 12, 8, NUM_ACTIONS], HeadKind::SoftmaxPolicy, rng.gen());
            let value = Mlp::init(&[OBS_LEN, 12, 8, 6, 1], HeadKind::ScalarValue, rng.gen());
            let mut env = CheatEnv::default();
            let v = algorithm.uses_value_net().then_some(&value);
            let mut batch = collect_batch(&mut env, &collector, v, 1, &config, &mut rng);
            let n = batch.len().min(12);
            batch.transitions.truncate(n);
            batch.returns.truncate(n);
            batch.episodes = std::iter::once(0..n).collect();
            batch.weights = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            // evaluate a different policy so PPO ratios are away from 1
            let policy = Mlp::init(&[OBS_LEN, 16, 12, 8, NUM_ACTIONS], HeadKind::SoftmaxPolicy, rng.gen());
            let surrogate = config.surrogate();
            let beta = config.entropy_coef;
            let eval = policy_gradient(&policy, &batch, &batch.inputs(), surrogate, beta);
            let numeric = numeric_gradient(&policy, |p| policy_objective(p, &batch, surrogate, beta), 1e-4);
            worst[k] = worst[k].max(max_relative_error(&eval.grads.flatten(), &numeric));
            if algorithm == Algorithm::Vpg {
                let (_, grads) = value_gradient(&value, &batch, &batch.inputs());
                let numeric = numeric_gradient(&value, |v| value_loss(v, &batch), 1e-4);
                worst[3] = worst[3].max(max_relative_error(&grads.flatten(), &numeric));
            }
        }
    }
    ["spg", "vpg", "ppo", "value_mse"]
        .iter()
        .zip(worst)
        .map(|(name, err)| GradCheckLine {
            objective: name.to_string(),
            batches,
            max_relative_error: err,
        })
        .collect()
}

pub fn cmd_grad_check(seed: u64, batches: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if batches == 0 {
        return Err(CliError::Validation("batches must be at least 1".into()));
    }
    let lines = grad_check(seed, batches);
    let mut failed = Vec::new();
    for l in &lines {
        let ok = l.max_relative_error < GRAD_CHECK_TOLERANCE;
        say(
            out,
            &format!("objective={} batches={} max_rel_err={:.3e} ok={ok}", l.objective, l.batches, l.max_relative_error),
        )?;
        if !ok {
            failed.push(l.objective.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("gradient mismatch in {}", failed.join(", "))))
    }
}

/// Plays one seeded cheat-variant game and writes its per-turn CSV. Without a
/// checkpoint the policy is uniform over the eleven actions.
pub fn cmd_simulate(
    seed: u64,
    checkpoint: Option<&Path>,
    greedy: bool,
    trace_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let policy = checkpoint.map(load_checkpoint).transpose()?.map(|c| c.policy);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = CheatEnv::default().with_recording(true);
    let mut obs = env.reset(rng.gen());
    while !env.is_done() {
        let probs = match &policy {
            Some(p) => p.forward_policy(&obs.to_f64()),
            None => vec![1.0 / NUM_ACTIONS as f64; NUM_ACTIONS],
        };
        let action = if greedy {
            (0..NUM_ACTIONS).fold(0, |b, i| if probs[i] > probs[b] { i } else { b })
        } else {
            sample_index(&probs, &mut rng)
        };
        obs = env
            .step(EnvAction::new(action).expect("eleven outputs"), &mut rng)
            .expect("episode running")
            .observation;
    }
    let state = env.state();
    let summary = format!(
        "turns={} score={} fireworks={} lives={}",
        state.turns_taken(),
        state.score(),
        state.fireworks_total(),
        state.life_tokens()
    );
    match trace_path {
        Some(p) => {
            let f = create_file(p)?;
            env.write_trace_csv(f)
                .map_err(|e| CliError::Validation(e.to_string()))?;
        }
        None => {
            let mut buf = Vec::new();
            env.write_trace_csv(&mut buf).expect("in-memory write");
            out.write_all(&buf).map_err(io_err("stdout"))?;
        }
    }
    say(out, &summary)
}

/// Default location for `verify perfect` files.
pub fn default_verify_dir() -> PathBuf {
    out_root().join("verify")
}
