use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EngineError;

pub const NUM_COLORS: usize = 5;
pub const NUM_RANKS: usize = 5;
pub const DECK_SIZE: usize = 50;

/// Number of copies of each rank within one color.
pub const COPIES_PER_RANK: [u8; NUM_RANKS] = [3, 2, 2, 2, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Color {
    Red,
    Yellow,
    Green,
    White,
    Blue,
}

impl Color {
    pub const ALL: [Color; NUM_COLORS] = [
        Color::Red,
        Color::Yellow,
        Color::Green,
        Color::White,
        Color::Blue,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Color> {
        Color::ALL.get(index).copied()
    }

    pub fn letter(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Yellow => 'Y',
            Color::Green => 'G',
            Color::White => 'W',
            Color::Blue => 'B',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c.to_ascii_uppercase() {
            'R' => Some(Color::Red),
            'Y' => Some(Color::Yellow),
            'G' => Some(Color::Green),
            'W' => Some(Color::White),
            'B' => Some(Color::Blue),
            _ => None,
        }
    }
}

/// A single Hanabi card. Ranks run 1 through 5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Card {
    color: Color,
    rank: u8,
}

impl Card {
    pub fn new(color: Color, rank: u8) -> Result<Card, EngineError> {
        if !(1..=NUM_RANKS as u8).contains(&rank) {
            return Err(EngineError::InvalidRank(rank));
        }
        Ok(Card { color, rank })
    }

    #[inline]
    pub fn color(self) -> Color {
        self.color
    }

    #[inline]
    pub fn rank(self) -> u8 {
        self.rank
    }

    /// Zero-based rank, handy for indexing.
    #[inline]
    pub fn rank_index(self) -> usize {
        self.rank as usize - 1
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.color.letter(), self.rank)
    }
}

impl FromStr for Card {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EngineError::BadCardToken(s.to_string());
        let mut chars = s.chars();
        let color = chars.next().and_then(Color::from_letter).ok_or_else(bad)?;
        let rank = chars
            .next()
            .and_then(|c| c.to_digit(10))
            .ok_or_else(bad)?;
        if chars.next().is_some() {
            return Err(bad());
        }
        Card::new(color, rank as u8).map_err(|_| bad())
    }
}

/// The 50-card multiset in a fixed order: colors in `Color::ALL` order, ranks ascending.
pub fn canonical_deck() -> Vec<Card> {
    let mut deck = Vec::with_capacity(DECK_SIZE);
    for color in Color::ALL {
        for (rank_idx, &copies) in COPIES_PER_RANK.iter().enumerate() {
            for _ in 0..copies {
                deck.push(Card {
                    color,
                    rank: rank_idx as u8 + 1,
                });
            }
        }
    }
    deck
}

/// Per-(color, rank) counts of a card collection.
pub fn card_counts<'a>(cards: impl IntoIterator<Item = &'a Card>) -> [[u8; NUM_RANKS]; NUM_COLORS] {
    let mut counts = [[0u8; NUM_RANKS]; NUM_COLORS];
    for card in cards {
        counts[card.color.index()][card.rank_index()] += 1;
    }
    counts
}

/// True when `cards` is a permutation of the canonical deck.
pub fn is_canonical_multiset(cards: &[Card]) -> bool {
    cards.len() == DECK_SIZE
        && card_counts(cards)
            .iter()
            .all(|per_color| per_color.iter().zip(COPIES_PER_RANK).all(|(&n, c)| n == c))
}
