use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::{Action, DeckSource, GameState, TurnOutcome};
use super::EngineError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnRecord {
    /// State before the action was applied.
    pub before: GameState,
    pub outcome: TurnOutcome,
}

/// A complete game: every pre-turn state and outcome plus the terminal state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameTrace {
    turns: Vec<TurnRecord>,
    final_state: GameState,
}

impl GameTrace {
    pub fn new(turns: Vec<TurnRecord>, final_state: GameState) -> Self {
        Self { turns, final_state }
    }

    pub fn turns(&self) -> &[TurnRecord] {
        &self.turns
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    pub fn initial_state(&self) -> &GameState {
        self.turns
            .first()
            .map(|t| &t.before)
            .unwrap_or(&self.final_state)
    }

    pub fn final_state(&self) -> &GameState {
        &self.final_state
    }

    /// State after turn `i` (zero-based).
    pub fn state_after(&self, i: usize) -> &GameState {
        self.turns
            .get(i + 1)
            .map(|t| &t.before)
            .unwrap_or(&self.final_state)
    }

    pub fn actions(&self) -> Vec<Action> {
        self.turns.iter().map(|t| t.outcome.action_taken).collect()
    }
}

/// Runs `policy` from `state` until the game ends.
pub fn play_out(
    mut state: GameState,
    mut policy: impl FnMut(&GameState) -> Action,
) -> Result<GameTrace, EngineError> {
    let mut turns = Vec::new();
    while state.is_in_progress() {
        let action = policy(&state);
        let before = state.clone();
        let outcome = state.apply_action_mut(action)?;
        turns.push(TurnRecord { before, outcome });
    }
    Ok(GameTrace::new(turns, state))
}

/// A game where every action is drawn uniformly from the legal set.
/// The deck is shuffled with `seed` and the policy uses an independent stream.
pub fn random_legal_game(players: usize, seed: u64) -> GameTrace {
    let state = GameState::new_game(players, DeckSource::Seeded(seed)).expect("valid player count");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    play_out(state, |s| {
        *s.legal_actions()
            .choose(&mut rng)
            .expect("legal action set is never empty")
    })
    .expect("legal actions always apply")
}
