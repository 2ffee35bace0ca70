use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use super::config::{AlgoOverrides, RunConfig};
use super::{
    cmd_eval, cmd_grad_check, cmd_simulate, cmd_train, cmd_verify, default_verify_dir, CliError,
    VerifyMode,
};
use crate::rl::Algorithm;

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: crate::rl::RlError| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "hanabi", version, about = "Hanabi engine, game-length verification and self-play training")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a policy on the open-hand variant.
    Train(TrainArgs),
    /// Evaluate a checkpoint over many test games.
    Eval(EvalArgs),
    /// Check game-length bounds, the perfect-game script, or the ledger delta table.
    Verify(VerifyArgs),
    /// Compare analytic and finite-difference gradients of every objective.
    GradCheck(GradCheckArgs),
    /// Play one seeded game and dump its per-turn trace as CSV.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "algo", value_parser = parse_algorithm)]
    pub algorithm: Option<Algorithm>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<u64>,
    #[arg(long)]
    pub batch_min_steps: Option<usize>,
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// Run directory (default: `$HANABI_OUT_DIR/<algo>-seed<seed>`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub clip_epsilon: Option<f64>,
    #[arg(long)]
    pub entropy_coef: Option<f64>,
    #[arg(long)]
    pub policy_iters: Option<u32>,
    #[arg(long)]
    pub value_iters: Option<u32>,
    #[arg(long)]
    pub policy_lr: Option<f64>,
    #[arg(long)]
    pub value_lr: Option<f64>,
}

impl TrainArgs {
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(a) = self.algorithm {
            c.algorithm = a;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(e) = self.epochs {
            c.epochs = e;
        }
        if let Some(b) = self.batch_min_steps {
            c.batch_min_steps = b;
        }
        if let Some(k) = self.checkpoint_every {
            c.checkpoint_every = k;
        }
        if let Some(o) = &self.out {
            c.output_dir = Some(o.clone());
        }
        c.algo = c.algo.merged_with(AlgoOverrides {
            gamma: self.gamma,
            lambda: self.lambda,
            clip_epsilon: self.clip_epsilon,
            entropy_coef: self.entropy_coef,
            policy_iters: self.policy_iters,
            value_iters: self.value_iters,
            policy_lr: self.policy_lr,
            value_lr: self.value_lr,
            normalize_targets: None,
        });
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub games: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pick the most probable action instead of sampling.
    #[arg(long)]
    pub greedy: bool,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub mode: VerifyMode,
    /// Single player count (default: all of 2..=5; `perfect` is 2-player only).
    #[arg(long)]
    pub players: Option<usize>,
    /// Random games per player count for `length` and `table6`.
    #[arg(long, default_value_t = 10_000)]
    pub games: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the `perfect` deck and action files (default: `$HANABI_OUT_DIR/verify`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GradCheckArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub batches: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Policy checkpoint; the uniform policy is used without one.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub greedy: bool,
    /// Write the trace CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => cmd_train(&a.run_config()?, out).map(|_| ()),
        Command::Eval(a) => {
            cmd_eval(&a.checkpoint, a.games, a.seed, a.greedy, a.out.as_deref(), out).map(|_| ())
        }
        Command::Verify(a) => {
            let dir = a.out.unwrap_or_else(default_verify_dir);
            cmd_verify(a.mode, a.players, a.games, a.seed, &dir, out)
        }
        Command::GradCheck(a) => cmd_grad_check(a.seed, a.batches, out),
        Command::Simulate(a) => {
            cmd_simulate(a.seed, a.checkpoint.as_deref(), a.greedy, a.out.as_deref(), out)
        }
    }
}

/// Parses `args` (program name first), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    let rendered = e.render().to_string();
                    if !rendered.contains("Usage:") {
                        let _ = writeln!(err, "\n{}", Cli::command().render_usage());
                    }
                    1
                }
            };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
