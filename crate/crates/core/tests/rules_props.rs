use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skat_core::gen::random_deal;
use skat_core::rules::{playable, trick_winner};
use skat_core::{Card, CardSet, GameType, Rank, SearchPosition, Seat, Suit, TrickState};

fn is_trump(c: Card, g: GameType) -> bool {
    match g {
        GameType::Null => false,
        GameType::Grand => c.rank() == Rank::Jack,
        GameType::Suit(s) => c.rank() == Rank::Jack || c.suit() == s,
    }
}

/// Follow class written out from the rules text.
fn same_class(a: Card, b: Card, g: GameType) -> bool {
    match (is_trump(a, g), is_trump(b, g)) {
        (true, true) => true,
        (false, false) => a.suit() == b.suit(),
        _ => false,
    }
}

fn strength(c: Card, g: GameType) -> u32 {
    let plain = |r: Rank| match r {
        Rank::Seven => 0,
        Rank::Eight => 1,
        Rank::Nine => 2,
        Rank::Queen => 3,
        Rank::King => 4,
        Rank::Ten => 5,
        Rank::Ace => 6,
        Rank::Jack => unreachable!(),
    };
    match g {
        GameType::Null => match c.rank() {
            Rank::Seven => 0,
            Rank::Eight => 1,
            Rank::Nine => 2,
            Rank::Ten => 3,
            Rank::Jack => 4,
            Rank::Queen => 5,
            Rank::King => 6,
            Rank::Ace => 7,
        },
        _ if c.rank() == Rank::Jack => 100 + c.suit() as u32,
        _ => plain(c.rank()),
    }
}

fn oracle_playable(hand: CardSet, lead: Option<Card>, g: GameType) -> CardSet {
    let Some(lead) = lead else { return hand };
    let follow: CardSet = hand.iter().filter(|&c| same_class(c, lead, g)).collect();
    if follow.is_empty() {
        hand
    } else {
        follow
    }
}

fn oracle_winner(cards: [Card; 3], g: GameType) -> usize {
    let mut best = 0;
    for i in 1..3 {
        let (b, c) = (cards[best], cards[i]);
        let better = match (is_trump(b, g), is_trump(c, g)) {
            (false, true) => true,
            (true, false) => false,
            _ => same_class(b, c, g) && strength(c, g) > strength(b, g),
        };
        if better {
            best = i;
        }
    }
    best
}

fn game_of(x: u8) -> GameType {
    match x % 6 {
        4 => GameType::Grand,
        5 => GameType::Null,
        s => GameType::Suit(Suit::ALL[s as usize]),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn playable_matches_oracle(hand in any::<u32>(), lead in 0u8..32, g in any::<u8>()) {
        let game = game_of(g);
        let lead = Card::from_index(lead);
        let hand = CardSet(hand).without(lead);
        prop_assume!(!hand.is_empty());
        let trick = TrickState::from_cards(Seat(0), &[lead]);
        let p = playable(hand, &trick, game);
        prop_assert_eq!(p, oracle_playable(hand, Some(lead), game));
        prop_assert!(p.is_subset(hand) && !p.is_empty());
        if hand.iter().any(|c| same_class(c, lead, game)) {
            prop_assert!(p.iter().all(|c| same_class(c, lead, game)));
        }
    }

    #[test]
    fn winner_matches_oracle(a in 0u8..32, b in 0u8..32, c in 0u8..32, g in any::<u8>(), leader in 0u8..3) {
        prop_assume!(a != b && b != c && a != c);
        let game = game_of(g);
        let cards = [Card::from_index(a), Card::from_index(b), Card::from_index(c)];
        let trick = TrickState::from_cards(Seat(leader), &cards);
        let w = trick_winner(&trick, game);
        prop_assert_eq!(w, Seat((leader + oracle_winner(cards, game) as u8) % 3));
        // same plays, other leader: the winning card is unchanged
        let other = TrickState::from_cards(Seat((leader + 1) % 3), &cards);
        prop_assert_eq!(trick_winner(&other, game), w.next());
    }

    #[test]
    fn full_games_partition_and_total(seed in any::<u64>(), g in 0u8..5) {
        let game = game_of(g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (hands, skat) = random_deal(&mut rng);
        prop_assert_eq!((hands[0] | hands[1] | hands[2] | skat).len(), 32);
        let mut pos = SearchPosition::deal(game, Seat(0), hands, skat, Seat(1));
        while !pos.is_over() {
            let held = pos.hands[0] | pos.hands[1] | pos.hands[2];
            let table = pos.trick.card_set();
            prop_assert_eq!(held.len() + table.len() + pos.played.len() + 2, 32);
            prop_assert!((held & table).is_empty() && (held & pos.played).is_empty());
            let c = *pos.legal().to_vec().choose(&mut rng).unwrap();
            pos = pos.play(c).unwrap();
        }
        prop_assert_eq!(pos.aspts + pos.gspts + skat.points(), 120);
        prop_assert_eq!(pos.declarer_tricks + pos.opponent_tricks, 10);
    }
}

#[test]
fn deck_points_total() {
    assert_eq!(CardSet::DECK.points(), 120);
    assert_eq!(CardSet::DECK.len(), 32);
    for i in 0..32 {
        let c = Card::from_index(i);
        assert_eq!(c.index(), c.suit() as u8 * 8 + c.rank() as u8);
    }
}
