//! Plain-text deck files: 50 whitespace-separated `<color letter><rank>` tokens
//! in deal-then-draw order, colors from `R Y G W B`.

use std::fs;
use std::path::Path;

use super::card::{is_canonical_multiset, Card};
use super::EngineError;

pub fn parse_deck(text: &str) -> Result<Vec<Card>, EngineError> {
    let deck = text
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<Vec<Card>, _>>()?;
    if !is_canonical_multiset(&deck) {
        return Err(EngineError::InvalidDeck);
    }
    Ok(deck)
}

/// Single line, tokens separated by one space, trailing newline.
pub fn format_deck(deck: &[Card]) -> String {
    let mut out = deck
        .iter()
        .map(Card::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    out.push('\n');
    out
}

pub fn read_deck_file(path: impl AsRef<Path>) -> Result<Vec<Card>, EngineError> {
    parse_deck(&fs::read_to_string(path)?)
}

pub fn write_deck_file(path: impl AsRef<Path>, deck: &[Card]) -> Result<(), EngineError> {
    fs::write(path, format_deck(deck))?;
    Ok(())
}
