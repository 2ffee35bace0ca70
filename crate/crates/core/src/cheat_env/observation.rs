//! 136-bit observation layout, in order:
//!
//! | segment         | width  | encoding                                    |
//! |-----------------|--------|---------------------------------------------|
//! | fireworks       | 5 × 5  | thermometer per color                       |
//! | own hand        | 5 × 10 | color one-hot ‖ rank one-hot per slot        |
//! | discard pile    | 5 × 10 | per color, rank groups of 3,2,2,2,1 filled left to right |
//! | life tokens     | 3      | thermometer                                 |
//! | hint tokens     | 8      | thermometer                                 |

use crate::engine::{
    card_counts, Card, Color, GameState, COPIES_PER_RANK, MAX_HINT_TOKENS, MAX_LIFE_TOKENS,
    NUM_COLORS, NUM_RANKS,
};

pub const HAND_SLOTS: usize = 5;
pub const SLOT_BITS: usize = NUM_COLORS + NUM_RANKS;
pub const DISCARD_BITS_PER_COLOR: usize = 10;

pub const FIREWORKS_OFFSET: usize = 0;
pub const HAND_OFFSET: usize = FIREWORKS_OFFSET + NUM_COLORS * NUM_RANKS;
pub const DISCARD_OFFSET: usize = HAND_OFFSET + HAND_SLOTS * SLOT_BITS;
pub const LIFE_OFFSET: usize = DISCARD_OFFSET + NUM_COLORS * DISCARD_BITS_PER_COLOR;
pub const HINT_OFFSET: usize = LIFE_OFFSET + MAX_LIFE_TOKENS as usize;
pub const OBS_LEN: usize = HINT_OFFSET + MAX_HINT_TOKENS as usize;

/// Start of each rank group inside a color's discard segment.
const RANK_GROUP_START: [usize; NUM_RANKS] = [0, 3, 5, 7, 9];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    bits: [u8; OBS_LEN],
}

impl std::fmt::Debug for Observation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect();
        f.debug_tuple("Observation").field(&s).finish()
    }
}

/// Segment-wise decoding of an [`Observation`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedObservation {
    pub fireworks: [u8; NUM_COLORS],
    pub hand: Vec<Option<Card>>,
    pub discard_counts: [[u8; NUM_RANKS]; NUM_COLORS],
    pub life_tokens: u8,
    pub hint_tokens: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("thermometer segment at bit {0} is not monotone")]
    NonMonotone(usize),
    #[error("one-hot segment at bit {0} has more than one bit set")]
    MultiHot(usize),
    #[error("hand slot {0} has a color without a rank or the reverse")]
    PartialSlot(usize),
}

impl Observation {
    pub fn encode(state: &GameState, player: usize) -> Observation {
        let mut bits = [0u8; OBS_LEN];

        for (c, &height) in state.fireworks().iter().enumerate() {
            let base = FIREWORKS_OFFSET + c * NUM_RANKS;
            bits[base..base + height as usize].fill(1);
        }

        for (slot, card) in state.hand(player).iter().take(HAND_SLOTS).enumerate() {
            let base = HAND_OFFSET + slot * SLOT_BITS;
            bits[base + card.color().index()] = 1;
            bits[base + NUM_COLORS + card.rank_index()] = 1;
        }

        let counts = card_counts(state.discard_pile());
        for (c, per_color) in counts.iter().enumerate() {
            let base = DISCARD_OFFSET + c * DISCARD_BITS_PER_COLOR;
            for (r, &n) in per_color.iter().enumerate() {
                let start = base + RANK_GROUP_START[r];
                bits[start..start + n as usize].fill(1);
            }
        }

        bits[LIFE_OFFSET..LIFE_OFFSET + state.life_tokens() as usize].fill(1);
        bits[HINT_OFFSET..HINT_OFFSET + state.hint_tokens() as usize].fill(1);

        Observation { bits }
    }

    pub fn bits(&self) -> &[u8; OBS_LEN] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        OBS_LEN
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| b as f64).collect()
    }

    pub fn segment(&self, offset: usize, width: usize) -> &[u8] {
        &self.bits[offset..offset + width]
    }

    pub fn decode(&self) -> Result<DecodedObservation, DecodeError> {
        fn thermometer(bits: &[u8], offset: usize) -> Result<u8, DecodeError> {
            let n = bits.iter().take_while(|&&b| b == 1).count();
            if bits[n..].iter().any(|&b| b != 0) {
                return Err(DecodeError::NonMonotone(offset));
            }
            Ok(n as u8)
        }
        fn one_hot(bits: &[u8], offset: usize) -> Result<Option<usize>, DecodeError> {
            let mut found = None;
            for (i, &b) in bits.iter().enumerate() {
                if b == 1 {
                    if found.is_some() {
                        return Err(DecodeError::MultiHot(offset));
                    }
                    found = Some(i);
                }
            }
            Ok(found)
        }

        let mut fireworks = [0u8; NUM_COLORS];
        for (c, height) in fireworks.iter_mut().enumerate() {
            let off = FIREWORKS_OFFSET + c * NUM_RANKS;
            *height = thermometer(&self.bits[off..off + NUM_RANKS], off)?;
        }

        let mut hand = Vec::with_capacity(HAND_SLOTS);
        for slot in 0..HAND_SLOTS {
            let off = HAND_OFFSET + slot * SLOT_BITS;
            let color = one_hot(&self.bits[off..off + NUM_COLORS], off)?;
            let rank = one_hot(&self.bits[off + NUM_COLORS..off + SLOT_BITS], off + NUM_COLORS)?;
            hand.push(match (color, rank) {
                (Some(c), Some(r)) => Some(
                    Card::new(Color::ALL[c], r as u8 + 1).expect("rank index below five"),
                ),
                (None, None) => None,
                _ => return Err(DecodeError::PartialSlot(slot)),
            });
        }

        let mut discard_counts = [[0u8; NUM_RANKS]; NUM_COLORS];
        for (c, per_color) in discard_counts.iter_mut().enumerate() {
            let base = DISCARD_OFFSET + c * DISCARD_BITS_PER_COLOR;
            for (r, count) in per_color.iter_mut().enumerate() {
                let off = base + RANK_GROUP_START[r];
                *count = thermometer(&self.bits[off..off + COPIES_PER_RANK[r] as usize], off)?;
            }
        }

        let life_tokens = thermometer(
            &self.bits[LIFE_OFFSET..LIFE_OFFSET + MAX_LIFE_TOKENS as usize],
            LIFE_OFFSET,
        )?;
        let hint_tokens = thermometer(
            &self.bits[HINT_OFFSET..HINT_OFFSET + MAX_HINT_TOKENS as usize],
            HINT_OFFSET,
        )?;

        Ok(DecodedObservation {
            fireworks,
            hand,
            discard_counts,
            life_tokens,
            hint_tokens,
        })
    }
}
