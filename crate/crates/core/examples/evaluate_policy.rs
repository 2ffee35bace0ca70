//! Train briefly, then compare the learned policy with the untrained one over test games.
//!
//! `cargo run --release --example evaluate_policy -- ppo 30`

use hanabi::cheat_env::{RewardTable, NUM_ACTIONS, OBS_LEN};
use hanabi::metrics::EvalReport;
use hanabi::nn::Mlp;
use hanabi::rl::{evaluate_policy, Algorithm, Trainer, TrainerConfig};

fn report(label: &str, policy: &Mlp) {
    let games = evaluate_policy(policy, 500, 123, false, RewardTable::default());
    let r = EvalReport::from_games(&games.summaries, &games.state_probs, 123, false);
    println!("{label:<9} {} fireworks={:.2} lives={:.2}", r.headline(), r.mean_fireworks, r.mean_lives_left);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let algorithm: Algorithm = args.next().as_deref().unwrap_or("ppo").parse()?;
    let epochs: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(30);

    report("untrained", &Mlp::policy(OBS_LEN, NUM_ACTIONS, 1));
    let mut trainer = Trainer::new(TrainerConfig::defaults_for(algorithm, 1))?;
    for _ in 0..epochs {
        trainer.run_epoch();
    }
    report("trained", trainer.policy());
    Ok(())
}
