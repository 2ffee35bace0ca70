use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::card::{
    canonical_deck, card_counts, is_canonical_multiset, Card, Color, COPIES_PER_RANK, NUM_COLORS,
    NUM_RANKS,
};
use super::EngineError;

pub const MAX_HINT_TOKENS: u8 = 8;
pub const MAX_LIFE_TOKENS: u8 = 3;
pub const MIN_PLAYERS: usize = 2;
pub const MAX_PLAYERS: usize = 5;

/// Hand capacity for a given player count.
pub fn hand_size(players: usize) -> usize {
    if players <= 3 {
        5
    } else {
        4
    }
}

/// Cards left in the deck right after dealing.
pub fn initial_deck_size(players: usize) -> usize {
    super::card::DECK_SIZE - players * hand_size(players)
}

fn check_players(players: usize) -> Result<(), EngineError> {
    if (MIN_PLAYERS..=MAX_PLAYERS).contains(&players) {
        Ok(())
    } else {
        Err(EngineError::InvalidPlayerCount(players))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeckSource {
    /// Uniform shuffle of the canonical deck driven by a ChaCha8 stream.
    Seeded(u64),
    /// Cards in deal-then-draw order; index 0 goes to player 0.
    Explicit(Vec<Card>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HintKind {
    Color(Color),
    Rank(u8),
}

impl HintKind {
    pub fn matches(self, card: Card) -> bool {
        match self {
            HintKind::Color(c) => card.color() == c,
            HintKind::Rank(r) => card.rank() == r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Play(usize),
    Discard(usize),
    Hint { target: usize, hint: HintKind },
}

impl Action {
    pub fn is_play(self) -> bool {
        matches!(self, Action::Play(_))
    }

    pub fn is_discard(self) -> bool {
        matches!(self, Action::Discard(_))
    }

    pub fn is_hint(self) -> bool {
        matches!(self, Action::Hint { .. })
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Action::Play(i) => write!(f, "play {i}"),
            Action::Discard(i) => write!(f, "discard {i}"),
            Action::Hint {
                target,
                hint: HintKind::Color(c),
            } => write!(f, "hint {target} {}", c.letter()),
            Action::Hint {
                target,
                hint: HintKind::Rank(r),
            } => write!(f, "hint {target} {r}"),
        }
    }
}

/// Inverse of `Display`: `play 2`, `discard 0`, `hint 1 R`, `hint 1 4`.
impl std::str::FromStr for Action {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, EngineError> {
        let bad = || EngineError::BadActionText(s.to_string());
        let words: Vec<&str> = s.split_whitespace().collect();
        let index = |w: &str| w.parse::<usize>().map_err(|_| bad());
        match words.as_slice() {
            ["play", i] => Ok(Action::Play(index(i)?)),
            ["discard", i] => Ok(Action::Discard(index(i)?)),
            ["hint", target, property] => {
                let target = index(target)?;
                let hint = match property.parse::<u8>() {
                    Ok(r) if (1..=NUM_RANKS as u8).contains(&r) => HintKind::Rank(r),
                    Ok(_) => return Err(bad()),
                    Err(_) => {
                        let mut chars = property.chars();
                        match (chars.next().and_then(Color::from_letter), chars.next()) {
                            (Some(c), None) => HintKind::Color(c),
                            _ => return Err(bad()),
                        }
                    }
                };
                Ok(Action::Hint { target, hint })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    InProgress,
    PerfectWin,
    DeckExhausted,
    LivesExhausted,
}

/// What happened during one call to [`GameState::apply_action`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnOutcome {
    pub actor: usize,
    pub action_taken: Action,
    pub was_successful_play: bool,
    /// Card that left the actor's hand (played or discarded).
    pub card_moved: Option<Card>,
    pub drew_card: bool,
    pub hint_token_delta: i8,
    pub life_token_delta: i8,
    pub deck_emptied_this_turn: bool,
    pub completed_stack: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CardClass {
    Playable,
    Useless,
    UniqueCritical,
    Other,
}

/// Raw fields for building an arbitrary position, mainly for tests and analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateParts {
    pub players: usize,
    /// Draw order, front first.
    pub deck: Vec<Card>,
    pub hands: Vec<Vec<Card>>,
    pub fireworks: [u8; NUM_COLORS],
    pub discard_pile: Vec<Card>,
    pub hint_tokens: u8,
    pub life_tokens: u8,
    pub current_player: usize,
    pub turns_taken: u32,
    pub endgame_turns_left: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GameState {
    players: usize,
    deck: VecDeque<Card>,
    hands: Vec<Vec<Card>>,
    fireworks: [u8; NUM_COLORS],
    discard_pile: Vec<Card>,
    hint_tokens: u8,
    life_tokens: u8,
    current_player: usize,
    turns_taken: u32,
    endgame_turns_left: Option<u8>,
    status: Status,
}

impl GameState {
    pub fn new_game(players: usize, source: DeckSource) -> Result<GameState, EngineError> {
        check_players(players)?;
        let order = match source {
            DeckSource::Seeded(seed) => {
                let mut deck = canonical_deck();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                deck.shuffle(&mut rng);
                deck
            }
            DeckSource::Explicit(deck) => {
                if !is_canonical_multiset(&deck) {
                    return Err(EngineError::InvalidDeck);
                }
                deck
            }
        };

        let per_hand = hand_size(players);
        let mut deck: VecDeque<Card> = order.into();
        let mut hands = vec![Vec::with_capacity(per_hand); players];
        for _ in 0..per_hand {
            for hand in hands.iter_mut() {
                // deck holds 50 cards, at most 25 are dealt
                hand.push(deck.pop_front().expect("deck large enough to deal"));
            }
        }

        Ok(GameState {
            players,
            deck,
            hands,
            fireworks: [0; NUM_COLORS],
            discard_pile: Vec::new(),
            hint_tokens: MAX_HINT_TOKENS,
            life_tokens: MAX_LIFE_TOKENS,
            current_player: 0,
            turns_taken: 0,
            endgame_turns_left: None,
            status: Status::InProgress,
        })
    }

    /// Builds a position from raw parts, checking card conservation and token bounds.
    pub fn from_parts(parts: StateParts) -> Result<GameState, EngineError> {
        check_players(parts.players)?;
        let invalid = |msg: &str| EngineError::InvalidState(msg.to_string());
        if parts.hands.len() != parts.players {
            return Err(invalid("hand count differs from player count"));
        }
        if parts
            .hands
            .iter()
            .any(|h| h.len() > hand_size(parts.players))
        {
            return Err(invalid("hand exceeds capacity"));
        }
        if parts.hint_tokens > MAX_HINT_TOKENS || parts.life_tokens > MAX_LIFE_TOKENS {
            return Err(invalid("token count out of range"));
        }
        if parts.fireworks.iter().any(|&h| h > NUM_RANKS as u8) {
            return Err(invalid("firework height out of range"));
        }
        if parts.current_player >= parts.players {
            return Err(invalid("current player out of range"));
        }
        match (parts.deck.is_empty(), parts.endgame_turns_left) {
            (false, Some(_)) => return Err(invalid("endgame counter set with cards in deck")),
            (true, None) => return Err(invalid("empty deck requires an endgame counter")),
            (true, Some(n)) if n as usize > parts.players => {
                return Err(invalid("endgame counter exceeds player count"))
            }
            _ => {}
        }

        let mut all: Vec<Card> = parts.deck.clone();
        all.extend(parts.hands.iter().flatten().copied());
        all.extend(parts.discard_pile.iter().copied());
        for color in Color::ALL {
            for rank in 1..=parts.fireworks[color.index()] {
                all.push(Card::new(color, rank)?);
            }
        }
        if !is_canonical_multiset(&all) {
            return Err(EngineError::InvalidDeck);
        }

        let mut state = GameState {
            players: parts.players,
            deck: parts.deck.into(),
            hands: parts.hands,
            fireworks: parts.fireworks,
            discard_pile: parts.discard_pile,
            hint_tokens: parts.hint_tokens,
            life_tokens: parts.life_tokens,
            current_player: parts.current_player,
            turns_taken: parts.turns_taken,
            endgame_turns_left: parts.endgame_turns_left,
            status: Status::InProgress,
        };
        state.status = state.derive_status();
        Ok(state)
    }

    pub fn to_parts(&self) -> StateParts {
        StateParts {
            players: self.players,
            deck: self.deck.iter().copied().collect(),
            hands: self.hands.clone(),
            fireworks: self.fireworks,
            discard_pile: self.discard_pile.clone(),
            hint_tokens: self.hint_tokens,
            life_tokens: self.life_tokens,
            current_player: self.current_player,
            turns_taken: self.turns_taken,
            endgame_turns_left: self.endgame_turns_left,
        }
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn deck_size(&self) -> usize {
        self.deck.len()
    }

    /// Remaining deck in draw order.
    pub fn deck(&self) -> impl Iterator<Item = &Card> + '_ {
        self.deck.iter()
    }

    pub fn hand(&self, player: usize) -> &[Card] {
        &self.hands[player]
    }

    pub fn hands(&self) -> &[Vec<Card>] {
        &self.hands
    }

    pub fn fireworks(&self) -> &[u8; NUM_COLORS] {
        &self.fireworks
    }

    pub fn firework(&self, color: Color) -> u8 {
        self.fireworks[color.index()]
    }

    pub fn fireworks_total(&self) -> u32 {
        self.fireworks.iter().map(|&h| h as u32).sum()
    }

    pub fn discard_pile(&self) -> &[Card] {
        &self.discard_pile
    }

    pub fn discard_count(&self, color: Color, rank: u8) -> usize {
        self.discard_pile
            .iter()
            .filter(|c| c.color() == color && c.rank() == rank)
            .count()
    }

    pub fn hint_tokens(&self) -> u8 {
        self.hint_tokens
    }

    pub fn life_tokens(&self) -> u8 {
        self.life_tokens
    }

    pub fn current_player(&self) -> usize {
        self.current_player
    }

    pub fn turns_taken(&self) -> u32 {
        self.turns_taken
    }

    pub fn endgame_turns_left(&self) -> Option<u8> {
        self.endgame_turns_left
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_in_progress(&self) -> bool {
        self.status == Status::InProgress
    }

    /// Zero after losing every life token, otherwise the sum of firework heights.
    pub fn score(&self) -> u32 {
        if self.status == Status::LivesExhausted {
            0
        } else {
            self.fireworks_total()
        }
    }

    fn derive_status(&self) -> Status {
        if self.life_tokens == 0 {
            Status::LivesExhausted
        } else if self.fireworks.iter().all(|&h| h as usize == NUM_RANKS) {
            Status::PerfectWin
        } else if self.endgame_turns_left == Some(0) {
            Status::DeckExhausted
        } else {
            Status::InProgress
        }
    }

    pub fn classify_card(&self, card: Card) -> CardClass {
        let height = self.firework(card.color());
        if card.rank() == height + 1 {
            return CardClass::Playable;
        }
        if card.rank() <= height {
            return CardClass::Useless;
        }
        let counts = card_counts(&self.discard_pile);
        let per_color = &counts[card.color().index()];
        let blocked = (height as usize..card.rank_index())
            .any(|r| per_color[r] == COPIES_PER_RANK[r]);
        if blocked {
            return CardClass::Useless;
        }
        if per_color[card.rank_index()] + 1 == COPIES_PER_RANK[card.rank_index()] {
            CardClass::UniqueCritical
        } else {
            CardClass::Other
        }
    }

    /// Distinct hints the current player could give `target` right now, ignoring tokens.
    pub fn hints_for(&self, target: usize) -> Vec<HintKind> {
        let hand = &self.hands[target];
        let mut hints = Vec::new();
        for color in Color::ALL {
            if hand.iter().any(|c| c.color() == color) {
                hints.push(HintKind::Color(color));
            }
        }
        for rank in 1..=NUM_RANKS as u8 {
            if hand.iter().any(|c| c.rank() == rank) {
                hints.push(HintKind::Rank(rank));
            }
        }
        hints
    }

    /// All legal actions in a fixed order: plays, discards, then hints by seat.
    pub fn legal_actions(&self) -> Vec<Action> {
        let mut actions = Vec::new();
        if !self.is_in_progress() {
            return actions;
        }
        let hand_len = self.hands[self.current_player].len();
        actions.extend((0..hand_len).map(Action::Play));
        if self.hint_tokens < MAX_HINT_TOKENS {
            actions.extend((0..hand_len).map(Action::Discard));
        }
        actions.extend(self.legal_hints());
        actions
    }

    pub fn legal_hints(&self) -> Vec<Action> {
        let mut hints = Vec::new();
        if !self.is_in_progress() || self.hint_tokens == 0 {
            return hints;
        }
        for offset in 1..self.players {
            let target = (self.current_player + offset) % self.players;
            hints.extend(
                self.hints_for(target)
                    .into_iter()
                    .map(|hint| Action::Hint { target, hint }),
            );
        }
        hints
    }

    pub fn is_legal(&self, action: Action) -> bool {
        if !self.is_in_progress() {
            return false;
        }
        let hand_len = self.hands[self.current_player].len();
        match action {
            Action::Play(i) => i < hand_len,
            Action::Discard(i) => i < hand_len && self.hint_tokens < MAX_HINT_TOKENS,
            Action::Hint { target, hint } => {
                self.hint_tokens > 0
                    && target < self.players
                    && target != self.current_player
                    && self.hands[target].iter().any(|&c| hint.matches(c))
                    && match hint {
                        HintKind::Rank(r) => (1..=NUM_RANKS as u8).contains(&r),
                        HintKind::Color(_) => true,
                    }
            }
        }
    }

    /// Pure transition: returns the successor state and leaves `self` untouched.
    pub fn apply_action(&self, action: Action) -> Result<(GameState, TurnOutcome), EngineError> {
        let mut next = self.clone();
        let outcome = next.apply_action_mut(action)?;
        Ok((next, outcome))
    }

    /// In-place variant of [`GameState::apply_action`]. On error the state is unchanged.
    pub fn apply_action_mut(&mut self, action: Action) -> Result<TurnOutcome, EngineError> {
        if !self.is_in_progress() {
            return Err(EngineError::GameOver);
        }
        if !self.is_legal(action) {
            return Err(EngineError::IllegalAction(action));
        }

        let actor = self.current_player;
        let deck_before = self.deck.len();
        let mut outcome = TurnOutcome {
            actor,
            action_taken: action,
            was_successful_play: false,
            card_moved: None,
            drew_card: false,
            hint_token_delta: 0,
            life_token_delta: 0,
            deck_emptied_this_turn: false,
            completed_stack: false,
        };

        match action {
            Action::Play(slot) | Action::Discard(slot) => {
                let card = self.hands[actor].remove(slot);
                outcome.card_moved = Some(card);
                if action.is_play() {
                    let height = &mut self.fireworks[card.color().index()];
                    if card.rank() == *height + 1 {
                        *height += 1;
                        outcome.was_successful_play = true;
                        if card.rank() as usize == NUM_RANKS {
                            outcome.completed_stack = true;
                            if self.hint_tokens < MAX_HINT_TOKENS {
                                self.hint_tokens += 1;
                                outcome.hint_token_delta = 1;
                            }
                        }
                    } else {
                        self.discard_pile.push(card);
                        self.life_tokens -= 1;
                        outcome.life_token_delta = -1;
                    }
                } else {
                    self.discard_pile.push(card);
                    self.hint_tokens += 1;
                    outcome.hint_token_delta = 1;
                }
                if let Some(drawn) = self.deck.pop_front() {
                    self.hands[actor].push(drawn);
                    outcome.drew_card = true;
                }
            }
            Action::Hint { .. } => {
                self.hint_tokens -= 1;
                outcome.hint_token_delta = -1;
            }
        }

        if deck_before == 0 {
            // counter is always set once the deck has run out
            let left = self.endgame_turns_left.expect("endgame counter set");
            self.endgame_turns_left = Some(left.saturating_sub(1));
        } else if outcome.drew_card && self.deck.is_empty() {
            outcome.deck_emptied_this_turn = true;
            self.endgame_turns_left = Some(self.players as u8);
        }

        self.turns_taken += 1;
        self.current_player = (actor + 1) % self.players;
        self.status = self.derive_status();
        Ok(outcome)
    }

    /// Total cards accounted for across every zone. Always 50 for a valid state.
    pub fn card_total(&self) -> usize {
        self.deck.len()
            + self.hands.iter().map(Vec::len).sum::<usize>()
            + self.discard_pile.len()
            + self.fireworks_total() as usize
    }

    /// Full conservation check against the canonical multiset.
    pub fn conserves_cards(&self) -> bool {
        let mut all: Vec<Card> = self.deck.iter().copied().collect();
        all.extend(self.hands.iter().flatten().copied());
        all.extend(self.discard_pile.iter().copied());
        for color in Color::ALL {
            for rank in 1..=self.firework(color) {
                all.push(Card::new(color, rank).expect("rank in range"));
            }
        }
        is_canonical_multiset(&all)
    }
}
