//! Print the ledger sum per player count and stress it with random legal games.
//!
//! `cargo run --release --example game_length -- 5000`

use hanabi::length_analysis::{fuzz_verify, ledger_init, perfect_upper_bound, stall_policy_game};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let games: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    println!("p  sigma0  stall  perfect_bound  max_random  violations");
    for p in 2..=5 {
        let l = ledger_init(p)?;
        let stall = stall_policy_game(p, 0)?.len();
        let fuzz = fuzz_verify(p, games, 1)?;
        let violations = fuzz.bound_violations + fuzz.monotonicity_violations + fuzz.table_mismatches;
        println!(
            "{p}  {:>6}  {stall:>5}  {:>13}  {:>10}  {violations:>10}",
            l.sigma,
            perfect_upper_bound(p)?,
            fuzz.max_turns
        );
    }
    Ok(())
}
