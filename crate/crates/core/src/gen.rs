//! Random deals and positions for self-play and tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cards::{Card, CardSet, Suit};
use crate::rules::{GameType, Seat};
use crate::solver::SearchPosition;

/// Shuffled deal: three hands of ten and a skat of two.
pub fn random_deal<R: Rng>(rng: &mut R) -> ([CardSet; 3], CardSet) {
    let mut deck: Vec<Card> = CardSet::DECK.to_vec();
    deck.shuffle(rng);
    let mut hands = [CardSet::EMPTY; 3];
    for (i, c) in deck[..30].iter().enumerate() {
        hands[i / 10].insert(*c);
    }
    let skat = deck[30..].iter().copied().collect();
    (hands, skat)
}

pub fn random_trump_game<R: Rng>(rng: &mut R) -> GameType {
    match rng.gen_range(0..5) {
        4 => GameType::Grand,
        s => GameType::Suit(Suit::ALL[s]),
    }
}

/// Plays uniformly random legal cards from the deal until at most
/// `tricks_left` tricks remain, then up to `max_table` further cards into
/// the open trick.
pub fn random_position<R: Rng>(rng: &mut R, game: GameType, tricks_left: u32, max_table: usize) -> SearchPosition {
    let (hands, skat) = random_deal(rng);
    let declarer = Seat(rng.gen_range(0..3));
    let forehand = Seat(rng.gen_range(0..3));
    let mut pos = SearchPosition::deal(game, declarer, hands, skat, forehand);
    let table = rng.gen_range(0..=max_table.min(2));
    let target = 30 - 3 * tricks_left.min(10) as usize + table;
    for _ in 0..target {
        pos = random_step(rng, &pos);
    }
    pos
}

pub fn random_step<R: Rng>(rng: &mut R, pos: &SearchPosition) -> SearchPosition {
    let legal = pos.legal().to_vec();
    let c = *legal.choose(rng).expect("legal move exists");
    pos.play(c).expect("legal move")
}
