use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tlci::formula::*;
use tlci::parser::{parse_formula, parse_interval};
use tlci::randform::{random_interval, random_mitl};
use tlci::semantics::eval_all;
use tlci::word::{generate_word, parse_timed_word, render_timed_word, GenConfig};

fn word(seed: u64, events: usize) -> tlci::word::TimedWord {
    generate_word(&GenConfig::new(&["P", "Q"], events, 4, 6), seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn formulas_print_and_parse_back(seed in any::<u64>(), depth in 0usize..4) {
        let f = random_mitl(&mut ChaCha8Rng::seed_from_u64(seed), &["P", "Q"], depth);
        let g = parse_formula(&f.to_string()).unwrap();
        prop_assert!(same(&f, &g), "{} vs {}", f, g);
    }

    #[test]
    fn intervals_print_and_parse_back(seed in any::<u64>()) {
        let i = random_interval(&mut ChaCha8Rng::seed_from_u64(seed));
        let j = parse_interval(&i.to_string()).unwrap();
        prop_assert_eq!(i, j);
    }

    #[test]
    fn words_render_and_parse_back(seed in any::<u64>(), events in 1usize..20) {
        let w = word(seed, events);
        let again = parse_timed_word(&render_timed_word(&w)).unwrap();
        prop_assert_eq!(w, again);
    }

    #[test]
    fn counting_is_antitone_in_k(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_interval(&mut rng);
        let w = word(seed, 12);
        let hi = eval_all(&w, &count(k + 1, i.clone(), atom("P")));
        let lo = eval_all(&w, &count(k, i, atom("P")));
        prop_assert!(hi.iter().zip(&lo).all(|(h, l)| !h || *l));
    }

    #[test]
    fn single_count_is_eventually(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let i = random_interval(&mut rng);
        let f = random_mitl(&mut rng, &["P", "Q"], 1);
        let w = word(seed ^ 0x5a5a, 12);
        prop_assert_eq!(eval_all(&w, &count(1, i.clone(), f.clone())), eval_all(&w, &eventually(i, f)));
    }
}
