//! Encode the first position of a seeded game and print the 136 bits segment by segment.

use hanabi::cheat_env::{
    CheatEnv, DISCARD_OFFSET, FIREWORKS_OFFSET, HAND_OFFSET, HINT_OFFSET, LIFE_OFFSET, OBS_LEN,
};

fn bits(s: &[u8]) -> String {
    s.iter().map(|b| b.to_string()).collect()
}

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut env = CheatEnv::default();
    let obs = env.reset(seed);
    let hand: Vec<String> = env.state().hand(0).iter().map(|c| c.to_string()).collect();
    println!("hand: {}", hand.join(" "));
    let segments = [
        ("fireworks", FIREWORKS_OFFSET, HAND_OFFSET),
        ("hand", HAND_OFFSET, DISCARD_OFFSET),
        ("discards", DISCARD_OFFSET, LIFE_OFFSET),
        ("lives", LIFE_OFFSET, HINT_OFFSET),
        ("hints", HINT_OFFSET, OBS_LEN),
    ];
    for (name, start, end) in segments {
        let chunk = if end - start > 10 { 10 } else { end - start };
        let groups: Vec<String> = obs.segment(start, end - start).chunks(chunk).map(bits).collect();
        println!("{name:<9} [{start:>3}..{end:>3}) {}", groups.join(" "));
    }
    println!("{:?}", obs.decode());
}
