mod common;

use common::{minimax, minimax_null, minimax_opponents};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skat_core::gen::{random_position, random_trump_game};
use skat_core::{cards::cards, dd_best_card, dd_decide, dd_null, dd_value, GameType, Seat, Solver, TrickState};
use skat_core::{CardSet, SearchPosition};

#[test]
fn value_matches_minimax() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..400 {
        let g = random_trump_game(&mut rng);
        let t = rng.gen_range(1..=4);
        let p = random_position(&mut rng, g, t, 2);
        let v = dd_value(&p);
        assert_eq!(v, minimax(&p), "position {i}: {p:?}");
        assert!(dd_decide(&p, v.saturating_sub(1)) || v == 0);
        assert!(!dd_decide(&p, v));
    }
}

#[test]
fn opponents_get_the_rest() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let g = random_trump_game(&mut rng);
        let p = random_position(&mut rng, g, 3, 2);
        assert_eq!(dd_value(&p) + minimax_opponents(&p), 120);
    }
}

#[test]
fn pruning_does_not_change_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..400 {
        let g = random_trump_game(&mut rng);
        let t = rng.gen_range(1..=5);
        let p = random_position(&mut rng, g, t, 2);
        let a = Solver::new(g, p.declarer).value(&p);
        let b = Solver::without_pruning(g, p.declarer).value(&p);
        assert_eq!(a, b, "position {i}: {p:?}");
    }
}

#[test]
fn decide_is_monotone_in_the_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..60 {
        let g = random_trump_game(&mut rng);
        let p = random_position(&mut rng, g, 3, 2);
        let mut s = Solver::new(g, p.declarer);
        let verdicts: Vec<bool> = (0..=120).map(|l| s.decide(&p, l)).collect();
        for w in verdicts.windows(2) {
            assert!(w[0] || !w[1]);
        }
        assert!(!verdicts[120]);
    }
}

#[test]
fn best_card_value_is_self_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let g = random_trump_game(&mut rng);
        let t = rng.gen_range(1..=4);
        let p = random_position(&mut rng, g, t, 2);
        let (c, v) = dd_best_card(&p);
        assert!(p.legal().contains(c));
        assert_eq!(v, dd_value(&p));
        assert_eq!(dd_value(&p.play(c).unwrap()), v);
        // no lower-indexed card attains the same value
        for d in p.legal().iter().take_while(|&d| d != c) {
            assert_ne!(dd_value(&p.play(d).unwrap()), v);
        }
    }
}

#[test]
fn full_deal_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..3 {
        let g = random_trump_game(&mut rng);
        let p = random_position(&mut rng, g, 10, 0);
        let mut s = Solver::new(g, p.declarer);
        let v = s.value(&p);
        assert!(v <= 120);
        assert!(s.decide(&p, v.saturating_sub(1)) || v == 0);
    }
}

#[test]
fn null_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut safe = 0;
    for i in 0..400 {
        let t = rng.gen_range(1..=4);
        let p = random_position(&mut rng, GameType::Null, t, 2);
        let r = dd_null(&p);
        assert_eq!(r, minimax_null(&p), "position {i}: {p:?}");
        safe += r as u32;
        assert_eq!(Solver::without_pruning(GameType::Null, p.declarer).null_safe(&p), r);
    }
    assert!(safe > 0);
}

fn null_ending(dec: &str, o1: &str, o2: &str, leader: u8) -> SearchPosition {
    let hands = [cards(dec), cards(o1), cards(o2)];
    let rest = CardSet::DECK - hands[0] - hands[1] - hands[2];
    let skat = rest.iter().take(2).collect::<CardSet>();
    SearchPosition {
        game: GameType::Null,
        declarer: Seat(0),
        hands,
        skat,
        trick: TrickState::new(Seat(leader)),
        played: rest - skat,
        aspts: 0,
        gspts: 0,
        declarer_tricks: 0,
        opponent_tricks: 0,
    }
}

#[test]
fn null_examples() {
    // lowest card of every live suit
    let p = null_ending("D7 H7 S7", "D8 H8 S8", "D9 H9 S9", 1);
    assert!(dd_null(&p));
    assert!(minimax_null(&p));
    // spade ace must eventually take a spade lead
    let p = null_ending("SA S7 H7", "SK SQ H8", "S8 S9 HT", 1);
    assert!(!dd_null(&p));
    assert!(!minimax_null(&p));
    let mut p = null_ending("D7 H7 S7", "D8 H8 S8", "D9 H9 S9", 1);
    p.declarer_tricks = 1;
    assert!(!dd_null(&p));
}
