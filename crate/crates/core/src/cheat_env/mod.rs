//! Two-player open-hand Hanabi as an episodic environment.
//!
//! Each player sees its own cards (but not the partner's). The policy picks
//! one of 11 actions: play slot 0..=4, discard slot 0..=4, or a random hint.
//! Selections the rules forbid are penalised and replaced by a uniformly
//! random legal selection, so every step is a real engine turn.

mod observation;
mod reward;

pub use observation::{
    DecodeError, DecodedObservation, Observation, DISCARD_OFFSET, FIREWORKS_OFFSET, HAND_OFFSET,
    HAND_SLOTS, HINT_OFFSET, LIFE_OFFSET, OBS_LEN,
};
pub use reward::{shaped_reward, RewardRows, RewardTable};

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::engine::{
    Action, DeckSource, EngineError, GameState, GameTrace, TurnRecord, MAX_HINT_TOKENS,
};

pub const NUM_ACTIONS: usize = 11;
pub const HINT_ACTION: usize = 10;
const PLAYERS: usize = 2;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode already finished; call reset")]
    EpisodeFinished,
    #[error("action index {0} outside 0..=10")]
    InvalidActionIndex(usize),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("trace i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnvAction(u8);

impl EnvAction {
    pub fn new(index: usize) -> Result<Self, EnvError> {
        if index < NUM_ACTIONS {
            Ok(EnvAction(index as u8))
        } else {
            Err(EnvError::InvalidActionIndex(index))
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn play(slot: usize) -> Self {
        assert!(slot < HAND_SLOTS);
        EnvAction(slot as u8)
    }

    pub fn discard(slot: usize) -> Self {
        assert!(slot < HAND_SLOTS);
        EnvAction((HAND_SLOTS + slot) as u8)
    }

    pub fn hint() -> Self {
        EnvAction(HINT_ACTION as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepInfo {
    /// Seat that acted this step.
    pub player: usize,
    pub score: u32,
    pub fireworks_total: u32,
    pub life_tokens: u8,
    pub hint_tokens: u8,
    pub deck_size: usize,
    pub turns: u32,
    pub illegal: bool,
    /// Index actually executed after any illegal-move substitution.
    pub executed_index: usize,
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
    pub rows: RewardRows,
}

/// One line of the optional CSV episode dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub turn: u32,
    pub player: usize,
    pub action_index: usize,
    pub reward: f64,
    pub score: u32,
    pub lives: u8,
    pub hints: u8,
    pub deck: usize,
}

pub const TRACE_CSV_HEADER: &str = "turn,player,action_index,reward,score,lives,hints,deck";

impl TraceRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.turn,
            self.player,
            self.action_index,
            self.reward,
            self.score,
            self.lives,
            self.hints,
            self.deck
        )
    }
}

#[derive(Debug, Clone)]
pub struct CheatEnv {
    state: GameState,
    rewards: RewardTable,
    done: bool,
    record: bool,
    turns: Vec<TurnRecord>,
    rows: Vec<TraceRow>,
}

impl CheatEnv {
    pub fn new(rewards: RewardTable) -> Self {
        let state = GameState::new_game(PLAYERS, DeckSource::Seeded(0)).expect("two players");
        Self {
            state,
            rewards,
            done: true,
            record: false,
            turns: Vec::new(),
            rows: Vec::new(),
        }
    }

    /// Keep a full engine trace plus CSV rows for every episode.
    pub fn with_recording(mut self, record: bool) -> Self {
        self.record = record;
        self
    }

    pub fn reset(&mut self, seed: u64) -> Observation {
        self.state = GameState::new_game(PLAYERS, DeckSource::Seeded(seed)).expect("two players");
        self.done = false;
        self.turns.clear();
        self.rows.clear();
        Observation::encode(&self.state, 0)
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn rewards(&self) -> &RewardTable {
        &self.rewards
    }

    pub fn observation(&self) -> Observation {
        Observation::encode(&self.state, self.state.current_player())
    }

    /// Which of the 11 selections the rules currently allow.
    pub fn legal_mask(&self) -> [bool; NUM_ACTIONS] {
        let mut mask = [false; NUM_ACTIONS];
        if !self.state.is_in_progress() {
            return mask;
        }
        let hand_len = self.state.hand(self.state.current_player()).len();
        let can_discard = self.state.hint_tokens() < MAX_HINT_TOKENS;
        for slot in 0..hand_len.min(HAND_SLOTS) {
            mask[slot] = true;
            mask[HAND_SLOTS + slot] = can_discard;
        }
        mask[HINT_ACTION] = !self.state.legal_hints().is_empty();
        mask
    }

    fn to_engine_action(&self, index: usize, rng: &mut impl Rng) -> Action {
        match index {
            i if i < HAND_SLOTS => Action::Play(i),
            i if i < 2 * HAND_SLOTS => Action::Discard(i - HAND_SLOTS),
            _ => *self
                .state
                .legal_hints()
                .choose(rng)
                .expect("hint index only mapped when a hint is legal"),
        }
    }

    pub fn step(&mut self, action: EnvAction, rng: &mut impl Rng) -> Result<StepResult, EnvError> {
        if self.done {
            return Err(EnvError::EpisodeFinished);
        }
        let mask = self.legal_mask();
        let illegal = !mask[action.index()];
        let executed = if illegal {
            let legal: Vec<usize> = (0..NUM_ACTIONS).filter(|&i| mask[i]).collect();
            // token count is either 8 (some hint exists) or below 8 (discard exists)
            *legal.choose(rng).expect("some selection is always legal")
        } else {
            action.index()
        };

        let engine_action = self.to_engine_action(executed, rng);
        let pre = self.state.clone();
        let outcome = self.state.apply_action_mut(engine_action)?;
        let rows = RewardRows::from_turn(&outcome, &pre, &self.state, illegal);
        let reward = self.rewards.value(&rows);
        self.done = !self.state.is_in_progress();

        let info = StepInfo {
            player: outcome.actor,
            score: self.state.score(),
            fireworks_total: self.state.fireworks_total(),
            life_tokens: self.state.life_tokens(),
            hint_tokens: self.state.hint_tokens(),
            deck_size: self.state.deck_size(),
            turns: self.state.turns_taken(),
            illegal,
            executed_index: executed,
        };
        if self.record {
            self.rows.push(TraceRow {
                turn: info.turns,
                player: info.player,
                action_index: action.index(),
                reward,
                score: info.score,
                lives: info.life_tokens,
                hints: info.hint_tokens,
                deck: info.deck_size,
            });
            self.turns.push(TurnRecord {
                before: pre,
                outcome,
            });
        }

        Ok(StepResult {
            observation: self.observation(),
            reward,
            done: self.done,
            info,
            rows,
        })
    }

    /// Engine trace of the current episode; empty unless recording is on.
    pub fn trace(&self) -> GameTrace {
        GameTrace::new(self.turns.clone(), self.state.clone())
    }

    pub fn trace_rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn write_trace_csv(&self, mut out: impl Write) -> Result<(), EnvError> {
        writeln!(out, "{TRACE_CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(out, "{}", row.to_csv())?;
        }
        Ok(())
    }
}

impl Default for CheatEnv {
    fn default() -> Self {
        Self::new(RewardTable::default())
    }
}
