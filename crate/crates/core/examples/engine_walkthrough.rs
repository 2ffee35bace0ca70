//! Deal a seeded game, take a few legal actions by hand and print each outcome.
//!
//! `cargo run --example engine_walkthrough -- 3 7`

use hanabi::engine::{Action, DeckSource, GameState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let players: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let mut state = GameState::new_game(players, DeckSource::Seeded(seed))?;
    for (p, hand) in state.hands().iter().enumerate() {
        let cards: Vec<String> = hand.iter().map(|c| c.to_string()).collect();
        println!("player {p}: {}", cards.join(" "));
    }
    println!("deck {} cards, {} legal actions", state.deck_size(), state.legal_actions().len());

    // a hint, a play and a discard, whichever are legal first
    let picks = [
        state.legal_hints().first().copied(),
        Some("play 0".parse::<Action>()?),
        Some("discard 1".parse::<Action>()?),
    ];
    for action in picks.into_iter().flatten() {
        let outcome = state.apply_action_mut(action)?;
        println!(
            "p{} {action}: success={} hints={} lives={} fireworks={:?}",
            outcome.actor,
            outcome.was_successful_play,
            state.hint_tokens(),
            state.life_tokens(),
            state.fireworks()
        );
    }
    Ok(())
}
