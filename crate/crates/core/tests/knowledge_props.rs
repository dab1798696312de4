mod common;

use common::{play_random, true_world};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skat_core::cards::cards;
use skat_core::gen::{random_deal, random_trump_game};
use skat_core::knowledge::KnowledgeSets;
use skat_core::placement::{Belief, SKAT};
use skat_core::{init_view, CardSet, GameType, Heuristics, KnowledgeView, Seat, SearchPosition, Suit, World};

fn admits(b: &Belief, view: &KnowledgeView, w: &World) -> bool {
    let placed = [w.hands[0], w.hands[1], w.hands[2], w.skat];
    (0..4).all(|l| {
        if b.free & (1 << l) == 0 {
            return l == view.seat.index() && placed[l] == view.own();
        }
        placed[l].is_subset(b.maybe[l]) && placed[l].len() == b.cap[l] as u32
    })
}

fn check_matrix(v: &KnowledgeView) {
    let worlds = v.enumerate_worlds(usize::MAX);
    let m = v.to_probability_matrix().unwrap();
    assert_eq!(m.total, worlds.len() as u128);
    let mut freq = [[0u128; 32]; 4];
    for w in &worlds {
        for (l, set) in w.hands.iter().chain(std::iter::once(&w.skat)).enumerate() {
            for c in *set {
                freq[l][c.index() as usize] += 1;
            }
        }
    }
    assert_eq!(m.counts, freq, "{}", v.dump());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn observations_only_refine(seed in any::<u64>(), suit_game in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = if suit_game { random_trump_game(&mut rng) } else { GameType::Null };
        let (hands, skat) = random_deal(&mut rng);
        let declarer = Seat(seed as u8 % 3);
        let forehand = Seat((seed >> 8) as u8 % 3);
        let mut pos = SearchPosition::deal(game, declarer, hands, skat, forehand);
        let mut views = Seat::ALL.map(|s| {
            init_view(s, hands[s.index()], game, declarer, (s == declarer).then_some(skat), forehand)
                .unwrap()
                .with_heuristics(Heuristics::SOUND)
        });
        use rand::seq::SliceRandom;
        while !pos.is_over() {
            let actor = pos.to_move();
            let c = *pos.legal().to_vec().choose(&mut rng).unwrap();
            for v in views.iter_mut() {
                let before = v.sound_belief();
                let next = v.observe_play(actor, c).unwrap();
                next.validate().unwrap();
                // the new belief space is contained in the old one with the card at the actor
                let after = next.count_worlds();
                if v.seat != actor {
                    prop_assert!(after <= before.count_with(c, actor.index()));
                } else {
                    prop_assert!(after <= before.count_worlds());
                }
                *v = next;
            }
            pos = pos.play(c).unwrap();
            let truth = true_world(&pos);
            for v in &views {
                prop_assert!(admits(&v.sound_belief(), v, &truth), "true deal lost\n{}", v.dump());
                prop_assert_eq!(v.aspts, if v.is_declarer() || pos.is_over() { pos.aspts + pos.skat.points() * v.skat_known() as u32 } else { pos.aspts });
            }
        }
    }

    #[test]
    fn matrix_matches_world_frequencies(seed in any::<u64>(), plies in 12usize..27) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let game = random_trump_game(&mut rng);
        let played = play_random(&mut rng, game, plies);
        for v in played.views {
            if v.count_worlds() <= 10_000 {
                check_matrix(&v);
            }
            let heur = v.clone().with_heuristics(Heuristics::default());
            if heur.count_worlds() <= 10_000 {
                check_matrix(&heur);
            }
        }
    }

    #[test]
    fn counts_match_enumeration(seed in any::<u64>(), plies in 15usize..28) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let played = play_random(&mut rng, GameType::Grand, plies);
        for v in played.views {
            let n = v.count_worlds();
            if n <= 20_000 {
                prop_assert_eq!(v.enumerate_worlds(usize::MAX).len() as u128, n);
                prop_assert_eq!(common::brute_worlds(&v).len() as u128, n);
            }
        }
    }

    #[test]
    fn truncation_is_a_prefix(seed in any::<u64>(), cap in 1usize..50) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let played = play_random(&mut rng, GameType::Suit(Suit::Spades), 18);
        let v = &played.views[0];
        let all = v.enumerate_worlds(200);
        let some = v.enumerate_worlds(cap);
        prop_assert_eq!(&all[..some.len()], &some[..]);
        prop_assert_eq!(some.len(), cap.min(all.len()));
    }

    #[test]
    fn sampled_worlds_are_consistent(seed in any::<u64>(), plies in 0usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let played = play_random(&mut rng, GameType::Grand, plies);
        for v in &played.views {
            let b = v.belief();
            let ws = v.sample_worlds(40, &mut rng);
            prop_assert_eq!(ws.len() as u128, b.count_worlds().min(40));
            for w in &ws {
                prop_assert!(admits(&b, v, w));
            }
            let mut dedup = ws.clone();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), ws.len());
        }
    }
}

#[test]
fn located_card_has_probability_one() {
    let v = KnowledgeView::from_sets(KnowledgeSets {
        seat: Seat(0),
        declarer: Seat(0),
        game: GameType::Grand,
        own: cards("CJ C7"),
        played: CardSet::DECK - cards("CJ C7 SJ C8 HJ DJ D7 D8"),
        hands: [CardSet::EMPTY, cards("SJ"), cards("C8")],
        skat: cards("D7 D8"),
        pool: cards("HJ DJ"),
        remaining: [2, 2, 2],
        ..Default::default()
    })
    .unwrap();
    let m = v.to_probability_matrix().unwrap();
    assert_eq!(m.p(1, "SJ".parse().unwrap()), 1.0);
    // two pool cards, each opponent missing one
    for c in cards("HJ DJ") {
        assert_eq!(m.p(1, c), 0.5);
        assert_eq!(m.p(2, c), 0.5);
    }
    assert_eq!(m.expected_count(1), 2.0);
}

#[test]
fn partner_or_skat_weights() {
    // opponent P1: partner has 3 unseen cards, skat 2, declarer 2 known void in diamonds
    let v = KnowledgeView::from_sets(KnowledgeSets {
        seat: Seat(1),
        declarer: Seat(0),
        game: GameType::Grand,
        own: cards("CJ SJ HJ"),
        played: CardSet::DECK - cards("CJ SJ HJ DJ C7 C8 C9 D7 D8 D9 DQ"),
        pool: cards("DJ C7 C8 C9"),
        orskat: [CardSet::EMPTY, CardSet::EMPTY, cards("D7 D8 D9 DQ")],
        remaining: [3, 3, 3],
        ..Default::default()
    })
    .unwrap();
    assert_eq!(v.partner_or_skat().len(), 4);
    check_matrix(&v);
    let m = v.to_probability_matrix().unwrap();
    let d7: skat_core::Card = "D7".parse().unwrap();
    assert_eq!(m.counts[2][d7.index() as usize] + m.counts[SKAT][d7.index() as usize], m.total);
}

#[test]
fn four_pool_cards_make_six_worlds() {
    let v = KnowledgeView::from_sets(KnowledgeSets {
        seat: Seat(0),
        declarer: Seat(0),
        game: GameType::Grand,
        own: cards("CJ SJ"),
        played: CardSet::DECK - cards("CJ SJ HJ DJ D7 D8 C7 C8"),
        skat: cards("C7 C8"),
        pool: cards("HJ DJ D7 D8"),
        remaining: [2, 2, 2],
        ..Default::default()
    })
    .unwrap();
    assert_eq!(v.enumerate_worlds(usize::MAX).len(), 6);
    assert_eq!(v.count_worlds(), 6);
}

#[test]
fn full_information_is_one_world() {
    let (hands, skat) = random_deal(&mut ChaCha8Rng::seed_from_u64(1));
    let pos = SearchPosition::deal(GameType::Grand, Seat(0), hands, skat, Seat(0));
    let v = KnowledgeView::open(&pos, Seat(0));
    assert!(v.pool().is_empty());
    assert_eq!(v.enumerate_worlds(10), vec![true_world(&pos)]);
}

#[test]
fn bidder_sees_231_skats() {
    let (hands, _) = random_deal(&mut ChaCha8Rng::seed_from_u64(5));
    for s in Seat::ALL {
        let v = init_view(s, hands[s.index()], GameType::Grand, Seat(0), None, Seat(0))
            .map(|v| v.with_heuristics(Heuristics::SOUND));
        if s == Seat(0) {
            // the declarer must know the skat
            assert!(v.is_err() || v.unwrap().possible_skats().len() == 231);
        } else {
            assert_eq!(v.unwrap().possible_skats().len(), 231);
        }
    }
}
