//! Train one learner for a few epochs and print the per-epoch metrics.
//!
//! `cargo run --release --example train_agent -- ppo 20 1`

use hanabi::rl::{Algorithm, Trainer, TrainerConfig, EPOCH_CSV_HEADER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let algorithm: Algorithm = args.next().as_deref().unwrap_or("vpg").parse()?;
    let epochs: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let mut trainer = Trainer::new(TrainerConfig::defaults_for(algorithm, seed))?;
    println!("{EPOCH_CSV_HEADER}");
    for _ in 0..epochs {
        println!("{}", trainer.run_epoch().to_csv());
    }
    Ok(())
}
