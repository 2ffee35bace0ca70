use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hanabi::cheat_env::Observation;
use hanabi::engine::{card_counts, DeckSource, GameState, MAX_HINT_TOKENS, MAX_LIFE_TOKENS};
use hanabi::length_analysis::{sigma0, SigmaLedger};

fn random_game(players: usize, seed: u64) -> Vec<GameState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = GameState::new_game(players, DeckSource::Seeded(seed)).unwrap();
    let mut states = vec![state.clone()];
    while state.is_in_progress() {
        let action = *state.legal_actions().choose(&mut rng).unwrap();
        state.apply_action_mut(action).unwrap();
        states.push(state.clone());
    }
    states
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cards_are_conserved_and_tokens_bounded(players in 2usize..=5, seed in any::<u64>()) {
        for s in random_game(players, seed) {
            prop_assert!(s.conserves_cards());
            prop_assert_eq!(s.card_total(), 50);
            prop_assert!(s.hint_tokens() <= MAX_HINT_TOKENS);
            prop_assert!(s.life_tokens() <= MAX_LIFE_TOKENS);
        }
    }

    #[test]
    fn ledger_never_increases_and_bounds_turns(players in 2usize..=5, seed in any::<u64>()) {
        let states = random_game(players, seed);
        let s0 = sigma0(players).unwrap();
        let mut prev = SigmaLedger::from_state(&states[0]).sigma;
        prop_assert_eq!(prev, s0);
        for s in &states[1..] {
            let l = SigmaLedger::from_state(s);
            prop_assert!(l.sigma <= prev);
            prop_assert!(l.t <= l.sigma);
            prev = l.sigma;
        }
        prop_assert!(states.last().unwrap().turns_taken() <= s0);
    }

    #[test]
    fn fireworks_never_decrease(players in 2usize..=5, seed in any::<u64>()) {
        let states = random_game(players, seed);
        for w in states.windows(2) {
            for (a, b) in w[0].fireworks().iter().zip(w[1].fireworks()) {
                prop_assert!(a <= b);
            }
        }
        let last = states.last().unwrap();
        prop_assert!(last.turns_taken() <= 89);
    }

    #[test]
    fn observation_decodes_to_the_state(seed in any::<u64>(), cut in 0usize..200) {
        let states = random_game(2, seed);
        let s = &states[cut % states.len()];
        let player = s.current_player();
        let d = Observation::encode(s, player).decode().unwrap();
        prop_assert_eq!(&d.fireworks, s.fireworks());
        prop_assert_eq!(d.life_tokens, s.life_tokens());
        prop_assert_eq!(d.hint_tokens, s.hint_tokens());
        prop_assert_eq!(d.discard_counts, card_counts(s.discard_pile()));
        let hand: Vec<_> = d.hand.iter().flatten().copied().collect();
        prop_assert_eq!(hand.as_slice(), s.hand(player));
    }
}
