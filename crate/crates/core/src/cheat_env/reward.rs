use serde::{Deserialize, Serialize};

use crate::engine::{CardClass, GameState, Status, TurnOutcome};

/// Per-event reward values. Defaults are the training settings used for all three algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardTable {
    pub successful_play: f64,
    /// Multiplies the fireworks total forfeited when the last life is lost; the row value is `-scale * score`.
    pub lost_all_lives_scale: f64,
    pub illegal_move: f64,
    pub lost_one_life: f64,
    pub hint: f64,
    pub play: f64,
    pub discard_playable: f64,
    pub discard_useless: f64,
    pub discard_unique: f64,
}

impl Default for RewardTable {
    fn default() -> Self {
        Self {
            successful_play: 10.0,
            lost_all_lives_scale: 1.0,
            illegal_move: -1.0,
            lost_one_life: -0.1,
            hint: -0.02,
            play: 0.02,
            discard_playable: -0.1,
            discard_useless: 0.1,
            discard_unique: -0.1,
        }
    }
}

/// Which reward rows fired on one turn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RewardRows {
    pub successful_play: u32,
    /// Fireworks total at the moment the final life was lost (0 if it was not lost).
    pub forfeited_score: u32,
    pub lost_all_lives: u32,
    pub illegal_move: u32,
    pub lost_one_life: u32,
    pub hint: u32,
    pub play: u32,
    pub discard_playable: u32,
    pub discard_useless: u32,
    pub discard_unique: u32,
}

impl RewardRows {
    pub fn from_turn(
        outcome: &TurnOutcome,
        pre_state: &GameState,
        post_state: &GameState,
        illegal: bool,
    ) -> Self {
        let mut rows = RewardRows {
            illegal_move: illegal as u32,
            ..Default::default()
        };
        let action = outcome.action_taken;
        if action.is_hint() {
            rows.hint = 1;
        }
        if action.is_play() {
            rows.play = 1;
            if outcome.was_successful_play {
                rows.successful_play = 1;
            }
        }
        if outcome.life_token_delta < 0 {
            rows.lost_one_life = 1;
            if post_state.status() == Status::LivesExhausted {
                rows.lost_all_lives = 1;
                rows.forfeited_score = post_state.fireworks_total();
            }
        }
        if action.is_discard() {
            let card = outcome.card_moved.expect("discard moves a card");
            match pre_state.classify_card(card) {
                CardClass::Playable => rows.discard_playable = 1,
                CardClass::Useless => rows.discard_useless = 1,
                CardClass::UniqueCritical => rows.discard_unique = 1,
                CardClass::Other => {}
            }
        }
        rows
    }

    pub fn add(&mut self, other: &RewardRows) {
        self.successful_play += other.successful_play;
        self.forfeited_score += other.forfeited_score;
        self.lost_all_lives += other.lost_all_lives;
        self.illegal_move += other.illegal_move;
        self.lost_one_life += other.lost_one_life;
        self.hint += other.hint;
        self.play += other.play;
        self.discard_playable += other.discard_playable;
        self.discard_useless += other.discard_useless;
        self.discard_unique += other.discard_unique;
    }
}

impl RewardTable {
    pub fn value(&self, rows: &RewardRows) -> f64 {
        self.successful_play * rows.successful_play as f64
            - self.lost_all_lives_scale * rows.forfeited_score as f64
            + self.illegal_move * rows.illegal_move as f64
            + self.lost_one_life * rows.lost_one_life as f64
            + self.hint * rows.hint as f64
            + self.play * rows.play as f64
            + self.discard_playable * rows.discard_playable as f64
            + self.discard_useless * rows.discard_useless as f64
            + self.discard_unique * rows.discard_unique as f64
    }
}

/// Sum of every reward row that applies to the turn.
pub fn shaped_reward(
    table: &RewardTable,
    outcome: &TurnOutcome,
    pre_state: &GameState,
    post_state: &GameState,
    illegal: bool,
) -> f64 {
    table.value(&RewardRows::from_turn(outcome, pre_state, post_state, illegal))
}
