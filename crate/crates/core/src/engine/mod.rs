//! Rule-complete Hanabi state machine for 2 to 5 players.
//!
//! Transitions are pure: [`GameState::apply_action`] returns a fresh state
//! together with a [`TurnOutcome`] describing token and card movement.
//! Drawn cards always enter a hand at the highest index; when a card leaves
//! a hand the cards above it slide down one slot.

mod card;
mod deck_file;
mod state;
mod trace;

pub use card::{
    canonical_deck, card_counts, is_canonical_multiset, Card, Color, COPIES_PER_RANK, DECK_SIZE,
    NUM_COLORS, NUM_RANKS,
};
pub use deck_file::{format_deck, parse_deck, read_deck_file, write_deck_file};
pub use state::{
    hand_size, initial_deck_size, Action, CardClass, DeckSource, GameState, HintKind, StateParts,
    Status, TurnOutcome, MAX_HINT_TOKENS, MAX_LIFE_TOKENS, MAX_PLAYERS, MIN_PLAYERS,
};
pub use trace::{random_legal_game, play_out, GameTrace, TurnRecord};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("player count {0} outside 2..=5")]
    InvalidPlayerCount(usize),
    #[error("deck is not a permutation of the 50-card Hanabi multiset")]
    InvalidDeck,
    #[error("rank {0} outside 1..=5")]
    InvalidRank(u8),
    #[error("cannot parse card token {0:?}")]
    BadCardToken(String),
    #[error("cannot parse action {0:?}")]
    BadActionText(String),
    #[error("illegal action: {0}")]
    IllegalAction(Action),
    #[error("game is already over")]
    GameOver,
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("deck file i/o: {0}")]
    Io(#[from] std::io::Error),
}
