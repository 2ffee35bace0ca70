//! Turn-budget ledger for bounding Hanabi game length.
//!
//! The ledger tracks `sigma = t + c + d + u + p`, where `t` counts turns taken,
//! `d` is the deck size, `c` the hint tokens that can still be spent before the
//! deck runs out, `u` the number of future draws that can still return such a
//! token, and `p` the turns left once the deck is empty. `sigma` never grows,
//! so `t <= sigma_0` for every game.
//!
//! Ledgers are always recomputed from engine state and compared against the
//! per-class prediction in [`predicted_delta`]; a disagreement surfaces as
//! [`LengthError::LedgerMismatch`].

mod script;

pub use script::{perfect_game_script, replay_script, PerfectScript};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{
    initial_deck_size, Action, DeckSource, EngineError, GameState, GameTrace,
    TurnOutcome, MAX_HINT_TOKENS, MAX_PLAYERS, MIN_PLAYERS, NUM_COLORS, NUM_RANKS,
};

#[derive(Debug, Error)]
pub enum LengthError {
    #[error("player count {0} outside 2..=5")]
    InvalidPlayerCount(usize),
    #[error("turn {turn}: {class:?} predicted {predicted:?}, observed {observed:?}")]
    LedgerMismatch {
        turn: u32,
        class: ActionClass,
        predicted: LedgerDelta,
        observed: LedgerDelta,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SigmaLedger {
    pub t: u32,
    pub c: u32,
    pub d: u32,
    pub u: u32,
    pub p_remaining: u32,
    pub sigma: u32,
}

impl SigmaLedger {
    pub fn new(t: u32, c: u32, d: u32, u: u32, p_remaining: u32) -> Self {
        Self {
            t,
            c,
            d,
            u,
            p_remaining,
            sigma: t + c + d + u + p_remaining,
        }
    }

    /// Reads the ledger straight off an engine state.
    pub fn from_state(state: &GameState) -> Self {
        let d = state.deck_size() as u32;
        let (c, u) = if d > 0 {
            (state.hint_tokens() as u32, d - 1)
        } else {
            (0, 0)
        };
        let p = state
            .endgame_turns_left()
            .map_or(state.players() as u32, u32::from);
        Self::new(state.turns_taken(), c, d, u, p)
    }

    pub fn delta_to(&self, next: &SigmaLedger) -> LedgerDelta {
        let diff = |a: u32, b: u32| b as i32 - a as i32;
        LedgerDelta {
            t: diff(self.t, next.t),
            c: diff(self.c, next.c),
            d: diff(self.d, next.d),
            u: diff(self.u, next.u),
            p: diff(self.p_remaining, next.p_remaining),
            sigma: diff(self.sigma, next.sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LedgerDelta {
    pub t: i32,
    pub c: i32,
    pub d: i32,
    pub u: i32,
    pub p: i32,
    pub sigma: i32,
}

impl LedgerDelta {
    const fn row(t: i32, c: i32, d: i32, u: i32, p: i32) -> Self {
        Self {
            t,
            c,
            d,
            u,
            p,
            sigma: t + c + d + u + p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ActionClass {
    Play,
    Discard,
    Hint,
    SuccessfulFivePlay,
    DeckEmptyingMove,
    EmptyDeckMove,
}

fn check_players(players: usize) -> Result<(), LengthError> {
    if (MIN_PLAYERS..=MAX_PLAYERS).contains(&players) {
        Ok(())
    } else {
        Err(LengthError::InvalidPlayerCount(players))
    }
}

/// Ledger before the first turn.
pub fn ledger_init(players: usize) -> Result<SigmaLedger, LengthError> {
    check_players(players)?;
    let d = initial_deck_size(players) as u32;
    Ok(SigmaLedger::new(
        0,
        MAX_HINT_TOKENS as u32,
        d,
        d - 1,
        players as u32,
    ))
}

/// Starting value of the ledger sum, the upper bound on game length.
pub fn sigma0(players: usize) -> Result<u32, LengthError> {
    ledger_init(players).map(|l| l.sigma)
}

/// Exception classes take priority over the plain action kind.
pub fn classify_turn(
    outcome: &TurnOutcome,
    pre_ledger: &SigmaLedger,
    pre_hint_tokens: u8,
) -> ActionClass {
    if pre_ledger.d == 0 {
        return ActionClass::EmptyDeckMove;
    }
    if outcome.deck_emptied_this_turn {
        return ActionClass::DeckEmptyingMove;
    }
    let five_played = outcome.was_successful_play
        && outcome.card_moved.is_some_and(|c| c.rank() as usize == NUM_RANKS);
    if five_played && pre_ledger.d > 1 && pre_hint_tokens < MAX_HINT_TOKENS {
        return ActionClass::SuccessfulFivePlay;
    }
    match outcome.action_taken {
        Action::Play(_) => ActionClass::Play,
        Action::Discard(_) => ActionClass::Discard,
        Action::Hint { .. } => ActionClass::Hint,
    }
}

/// Expected ledger change for one turn of the given class.
pub fn predicted_delta(class: ActionClass, pre_ledger: &SigmaLedger) -> LedgerDelta {
    match class {
        ActionClass::Play => LedgerDelta::row(1, 0, -1, -1, 0),
        ActionClass::Discard => LedgerDelta::row(1, 1, -1, -1, 0),
        ActionClass::Hint => LedgerDelta::row(1, -1, 0, 0, 0),
        ActionClass::SuccessfulFivePlay => LedgerDelta::row(1, 1, -1, -1, 0),
        ActionClass::DeckEmptyingMove => LedgerDelta::row(1, -(pre_ledger.c as i32), -1, 0, 0),
        ActionClass::EmptyDeckMove => LedgerDelta::row(1, 0, 0, 0, -1),
    }
}

/// Recomputes the ledger from `post_state` and checks it against the prediction.
pub fn ledger_update(
    ledger: &SigmaLedger,
    post_state: &GameState,
    class: ActionClass,
) -> Result<SigmaLedger, LengthError> {
    let next = SigmaLedger::from_state(post_state);
    let observed = ledger.delta_to(&next);
    let predicted = predicted_delta(class, ledger);
    if observed != predicted {
        return Err(LengthError::LedgerMismatch {
            turn: next.t,
            class,
            predicted,
            observed,
        });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LedgerStep {
    pub class: ActionClass,
    pub before: SigmaLedger,
    pub after: SigmaLedger,
    pub is_play: bool,
}

impl LedgerStep {
    pub fn delta(&self) -> LedgerDelta {
        self.before.delta_to(&self.after)
    }
}

/// Classifies and checks every turn of a trace.
pub fn annotate(trace: &GameTrace) -> Result<Vec<LedgerStep>, LengthError> {
    let mut steps = Vec::with_capacity(trace.len());
    for (i, record) in trace.turns().iter().enumerate() {
        let before = SigmaLedger::from_state(&record.before);
        let class = classify_turn(&record.outcome, &before, record.before.hint_tokens());
        let after = ledger_update(&before, trace.state_after(i), class)?;
        steps.push(LedgerStep {
            class,
            before,
            after,
            is_play: record.outcome.action_taken.is_play(),
        });
    }
    Ok(steps)
}

/// Number of play turns that left the ledger sum unchanged.
pub fn exception_play_count(steps: &[LedgerStep]) -> usize {
    steps
        .iter()
        .filter(|s| s.is_play && s.delta().sigma == 0)
        .count()
}

/// Hints until tokens run out, then alternate discard and hint until the deck
/// is empty, then discard through the final round. Never plays a card.
pub fn stall_policy_game(players: usize, seed: u64) -> Result<GameTrace, LengthError> {
    check_players(players)?;
    let state = GameState::new_game(players, DeckSource::Seeded(seed))?;
    let trace = crate::engine::play_out(state, |s| {
        if s.deck_size() > 0 && s.hint_tokens() > 0 {
            s.legal_hints()[0]
        } else {
            Action::Discard(0)
        }
    })?;
    Ok(trace)
}

/// Largest turn count any perfect game could reach with `players` players.
pub fn perfect_upper_bound(players: usize) -> Result<u32, LengthError> {
    let exceptions = NUM_RANKS as u32 + players as u32;
    let perfect = (NUM_COLORS * NUM_RANKS) as u32;
    Ok(sigma0(players)? - (perfect - exceptions))
}

/// Closed form for the stalling game: all hints, every card discarded with a
/// hint between consecutive discards, then one turn per player.
pub fn stall_length_formula(players: usize) -> u32 {
    let d0 = initial_deck_size(players) as u32;
    MAX_HINT_TOKENS as u32 + d0 + (d0 - 1) + players as u32
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FuzzReport {
    pub players: usize,
    pub games: usize,
    pub sigma0: u32,
    pub max_turns: u32,
    pub total_turns: u64,
    /// Turns where `t > sigma`.
    pub bound_violations: usize,
    /// Turns where sigma increased.
    pub monotonicity_violations: usize,
    pub table_mismatches: usize,
    pub negative_components: usize,
    pub perfect_games: usize,
    pub census_violations: usize,
    pub unterminated_games: usize,
    pub first_failure: Option<String>,
}

impl FuzzReport {
    pub fn ok(&self) -> bool {
        self.bound_violations == 0
            && self.monotonicity_violations == 0
            && self.table_mismatches == 0
            && self.census_violations == 0
            && self.unterminated_games == 0
            && self.max_turns <= self.sigma0
    }
}

/// Plays `games` uniformly random legal games and checks every ledger property on every turn.
pub fn fuzz_verify(players: usize, games: usize, seed: u64) -> Result<FuzzReport, LengthError> {
    use rand::seq::SliceRandom;
    use rand::Rng;

    check_players(players)?;
    let sigma0 = sigma0(players)?;
    let mut report = FuzzReport {
        players,
        games,
        sigma0,
        ..FuzzReport::default()
    };
    let mut root = ChaCha8Rng::seed_from_u64(seed);
    let turn_cap = 10 * sigma0 as usize;

    for _ in 0..games {
        let deck_seed: u64 = root.gen();
        let mut state = GameState::new_game(players, DeckSource::Seeded(deck_seed))?;
        let mut ledger = SigmaLedger::from_state(&state);
        let mut exceptions = 0usize;
        let mut steps = 0usize;
        while state.is_in_progress() {
            if steps >= turn_cap {
                report.unterminated_games += 1;
                break;
            }
            let actions = state.legal_actions();
            let action = *actions.choose(&mut root).expect("legal set non-empty");
            let pre_hints = state.hint_tokens();
            let outcome = state.apply_action_mut(action)?;
            steps += 1;
            let class = classify_turn(&outcome, &ledger, pre_hints);
            let next = SigmaLedger::from_state(&state);
            let observed = ledger.delta_to(&next);
            let predicted = predicted_delta(class, &ledger);
            if observed != predicted {
                report.table_mismatches += 1;
                report.first_failure.get_or_insert_with(|| {
                    format!("turn {}: {class:?} predicted {predicted:?} observed {observed:?}", next.t)
                });
            }
            if class == ActionClass::DeckEmptyingMove && observed.sigma > 0 {
                report.table_mismatches += 1;
            }
            if next.sigma > ledger.sigma {
                report.monotonicity_violations += 1;
            }
            if next.t > next.sigma {
                report.bound_violations += 1;
            }
            if action.is_play() && observed.sigma == 0 {
                exceptions += 1;
            }
            ledger = next;
        }
        report.total_turns += state.turns_taken() as u64;
        report.max_turns = report.max_turns.max(state.turns_taken());
        if state.score() == 25 {
            report.perfect_games += 1;
            if exceptions > NUM_RANKS + players {
                report.census_violations += 1;
            }
        }
    }
    Ok(report)
}
