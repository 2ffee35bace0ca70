//! Constructive 71-turn perfect game for two players.
//!
//! Shape of the game: spend all 8 hints, complete four fireworks plus ranks 1
//! and 2 of the fifth (22 plays, the four rank-5 plays each returning a token),
//! spend the 4 returned tokens, alternate discard and hint 17 times, play the
//! rank 3 that empties the deck, then play ranks 4 and 5 in the final round.
//!
//! The deck is built lazily: every card leaves a hand from slot 0, and the
//! deck position behind that slot is assigned the card the script needs at
//! that moment. Remaining positions receive the 25 spare duplicates.

use crate::engine::{
    canonical_deck, Action, Card, Color, DeckSource, GameState, GameTrace, NUM_RANKS,
};

use super::LengthError;

const PLAYERS: usize = 2;
const OPENING_HINTS: usize = 8;
const STALL_ROUNDS: usize = 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Hint,
    Play(Card),
    Discard,
}

/// A stacked deck plus the full action list that realizes the 71-turn perfect game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectScript {
    pub deck: Vec<Card>,
    pub actions: Vec<Action>,
}

fn card(color: Color, rank: u8) -> Card {
    Card::new(color, rank).expect("rank in range")
}

fn steps() -> Vec<Step> {
    let mut steps = vec![Step::Hint; OPENING_HINTS];
    let [first, second, third, fourth, last] = Color::ALL;
    for color in [first, second, third, fourth] {
        steps.extend((1..=NUM_RANKS as u8).map(|r| Step::Play(card(color, r))));
    }
    steps.push(Step::Play(card(last, 1)));
    steps.push(Step::Play(card(last, 2)));
    // one token back per completed stack
    steps.extend([Step::Hint; 4]);
    for _ in 0..STALL_ROUNDS {
        steps.push(Step::Discard);
        steps.push(Step::Hint);
    }
    steps.push(Step::Play(card(last, 3)));
    steps.push(Step::Play(card(last, 4)));
    steps.push(Step::Play(card(last, 5)));
    steps
}

pub fn perfect_game_script() -> PerfectScript {
    let steps = steps();
    let total = canonical_deck().len();
    let per_hand = crate::engine::hand_size(PLAYERS);

    // hands hold deck positions; dealing is round-robin from the front
    let mut hands: Vec<Vec<usize>> = vec![Vec::new(); PLAYERS];
    for pos in 0..PLAYERS * per_hand {
        hands[pos % PLAYERS].push(pos);
    }
    let mut next_draw = PLAYERS * per_hand;
    let mut assigned: Vec<Option<Card>> = vec![None; total];

    for (turn, step) in steps.iter().enumerate() {
        let actor = turn % PLAYERS;
        match *step {
            Step::Hint => {}
            Step::Play(_) | Step::Discard => {
                let pos = hands[actor].remove(0);
                if let Step::Play(c) = *step {
                    assigned[pos] = Some(c);
                }
                if next_draw < total {
                    hands[actor].push(next_draw);
                    next_draw += 1;
                }
            }
        }
    }

    let mut spares = canonical_deck();
    for c in assigned.iter().flatten() {
        let i = spares.iter().position(|s| s == c).expect("each played card is unique");
        spares.remove(i);
    }
    let mut spares = spares.into_iter();
    let deck: Vec<Card> = assigned
        .into_iter()
        .map(|slot| slot.unwrap_or_else(|| spares.next().expect("25 spares fill 25 slots")))
        .collect();

    // Hints are picked at replay time from whatever the partner holds.
    let mut state = GameState::new_game(PLAYERS, DeckSource::Explicit(deck.clone()))
        .expect("constructed deck is canonical");
    let mut actions = Vec::with_capacity(steps.len());
    for step in &steps {
        let action = match step {
            Step::Hint => state.legal_hints()[0],
            Step::Play(_) => Action::Play(0),
            Step::Discard => Action::Discard(0),
        };
        state.apply_action_mut(action).expect("scripted action is legal");
        actions.push(action);
    }

    PerfectScript { deck, actions }
}

/// Replays an explicit deck and action list through the engine.
pub fn replay_script(deck: &[Card], actions: &[Action]) -> Result<GameTrace, LengthError> {
    let mut state = GameState::new_game(PLAYERS, DeckSource::Explicit(deck.to_vec()))?;
    let mut turns = Vec::with_capacity(actions.len());
    for &action in actions {
        let before = state.clone();
        let outcome = state.apply_action_mut(action)?;
        turns.push(crate::engine::TurnRecord { before, outcome });
    }
    Ok(GameTrace::new(turns, state))
}
