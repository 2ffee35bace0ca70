//! Replay the scripted two-player 25-point game and show how each turn moves the ledger.

use hanabi::length_analysis::{annotate, perfect_game_script, replay_script, ActionClass};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let script = perfect_game_script();
    let trace = replay_script(&script.deck, &script.actions)?;
    let steps = annotate(&trace)?;
    for (i, (turn, step)) in trace.turns().iter().zip(&steps).enumerate() {
        let mark = if step.class == ActionClass::SuccessfulFivePlay { " *" } else { "" };
        println!(
            "{:>2} {:<12} {:?} sigma {} -> {}{mark}",
            i + 1,
            turn.outcome.action_taken.to_string(),
            step.class,
            step.before.sigma,
            step.after.sigma
        );
    }
    println!("turns={} score={}", trace.len(), trace.final_state().score());
    Ok(())
}
