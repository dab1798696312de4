//! Open-card solver.
//!
//! The core is a boolean decision at a point limit ("does the declarer end
//! with more than `limit` points?"); exact values come from binary search
//! over that decision. A transposition table at trick starts keeps lower and
//! upper bounds on the points the declarer still collects, so repeated
//! decisions with different limits share work.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet};
use crate::error::PlayError;
use crate::knowledge::{KnowledgeView, World};
use crate::rules::{GameType, Rules, Seat, TrickState};

/// A fully determined mid-game state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchPosition {
    pub game: GameType,
    pub declarer: Seat,
    pub hands: [CardSet; 3],
    #[serde(default)]
    pub skat: CardSet,
    pub trick: TrickState,
    /// Cards of completed tricks.
    #[serde(default)]
    pub played: CardSet,
    /// Declarer points from completed tricks, skat excluded.
    #[serde(default)]
    pub aspts: u32,
    #[serde(default)]
    pub gspts: u32,
    #[serde(default)]
    pub declarer_tricks: u8,
    #[serde(default)]
    pub opponent_tricks: u8,
}

impl SearchPosition {
    /// Start of play: all hands full, forehand to lead.
    pub fn deal(game: GameType, declarer: Seat, hands: [CardSet; 3], skat: CardSet, forehand: Seat) -> SearchPosition {
        SearchPosition {
            game,
            declarer,
            hands,
            skat,
            trick: TrickState::new(forehand),
            played: CardSet::EMPTY,
            aspts: 0,
            gspts: 0,
            declarer_tricks: 0,
            opponent_tricks: 0,
        }
    }

    /// Completes a knowledge view with one world.
    pub fn from_world(view: &KnowledgeView, world: &World) -> SearchPosition {
        SearchPosition {
            game: view.game,
            declarer: view.declarer,
            hands: world.hands,
            skat: world.skat,
            trick: view.trick,
            played: view.played - view.trick.card_set(),
            aspts: view.trick_aspts(),
            gspts: view.gspts,
            declarer_tricks: view.declarer_tricks,
            opponent_tricks: view.tricks_done() as u8 - view.declarer_tricks,
        }
    }

    pub fn to_move(&self) -> Seat {
        self.trick.to_move()
    }

    pub fn is_over(&self) -> bool {
        self.trick.is_empty() && self.hands.iter().all(|h| h.is_empty())
    }

    pub fn legal(&self) -> CardSet {
        let rules = Rules::new(self.game);
        rules.playable(self.hands[self.to_move().index()], self.trick.lead())
    }

    /// Points not yet assigned to either side (hands and table).
    pub fn points_in_play(&self) -> u32 {
        (self.hands[0] | self.hands[1] | self.hands[2]).points() + self.trick.points()
    }

    /// Plays `card` for the seat to move, resolving a completed trick.
    pub fn play(&self, card: Card) -> Result<SearchPosition, PlayError> {
        let rules = Rules::new(self.game);
        self.play_with(&rules, card)
    }

    pub(crate) fn play_with(&self, rules: &Rules, card: Card) -> Result<SearchPosition, PlayError> {
        if self.is_over() {
            return Err(PlayError::GameOver);
        }
        let seat = self.to_move();
        let hand = self.hands[seat.index()];
        if !hand.contains(card) {
            return Err(PlayError::NotInHand { seat, card });
        }
        let legal = rules.playable(hand, self.trick.lead());
        if !legal.contains(card) {
            return Err(PlayError::MustFollow { card, legal });
        }
        let mut next = *self;
        next.hands[seat.index()].remove(card);
        next.trick.push(card);
        if next.trick.is_complete() {
            let c = next.trick.cards();
            let w = rules.winning_index([c[0], c[1], c[2]]);
            let winner = Seat((next.trick.leader.0 + w as u8) % 3);
            let pts = next.trick.points();
            next.played |= next.trick.card_set();
            if winner == self.declarer {
                next.aspts += pts;
                next.declarer_tricks += 1;
            } else {
                next.gspts += pts;
                next.opponent_tricks += 1;
            }
            next.trick = TrickState::new(winner);
        }
        Ok(next)
    }

    /// Checks the deck partition and hand sizes.
    pub fn check(&self) -> Result<(), String> {
        let parts = [
            self.hands[0],
            self.hands[1],
            self.hands[2],
            self.skat,
            self.played,
            self.trick.card_set(),
        ];
        let mut seen = CardSet::EMPTY;
        for p in parts {
            if seen.intersects(p) {
                return Err(format!("cards listed twice: {}", (seen & p).to_text()));
            }
            seen |= p;
        }
        if seen != CardSet::DECK {
            return Err(format!("cards missing: {}", (CardSet::DECK - seen).to_text()));
        }
        if self.skat.len() != 2 {
            return Err(format!("skat holds {} cards", self.skat.len()));
        }
        let base = self.hands[self.trick.leader.index()].len() + !self.trick.is_empty() as u32;
        for i in 0..self.trick.len() {
            let s = (self.trick.leader.0 as usize + i) % 3;
            if self.hands[s].len() + 1 != base {
                return Err(format!("seat {s} holds {} cards", self.hands[s].len()));
            }
        }
        for i in self.trick.len()..3 {
            let s = (self.trick.leader.0 as usize + i) % 3;
            if self.hands[s].len() != base {
                return Err(format!("seat {s} holds {} cards", self.hands[s].len()));
            }
        }
        if self.aspts + self.gspts + self.points_in_play() + self.skat.points() != 120 {
            return Err("point accounting does not add up to 120".into());
        }
        Ok(())
    }
}

/// Candidate moves in search order.
#[derive(Clone, Copy)]
pub(crate) struct Moves {
    cards: [Card; 32],
    len: usize,
}

impl Moves {
    fn new() -> Moves {
        Moves {
            cards: [Card::from_index(0); 32],
            len: 0,
        }
    }

    fn push(&mut self, c: Card) {
        self.cards[self.len] = c;
        self.len += 1;
    }

    pub(crate) fn as_slice(&self) -> &[Card] {
        &self.cards[..self.len]
    }
}

/// Per-game tables shared by the searches.
#[derive(Clone, Debug)]
pub(crate) struct Tables {
    pub rules: Rules,
    /// Cards of the same class ranked below each card.
    pub below: [CardSet; 32],
}

impl Tables {
    pub fn new(game: GameType) -> Tables {
        let rules = Rules::new(game);
        let mut below = [CardSet::EMPTY; 32];
        for i in 0..32u8 {
            let c = Card::from_index(i);
            below[i as usize] = rules
                .class_of(c)
                .iter()
                .filter(|&d| rules.power(d) < rules.power(c))
                .collect();
        }
        Tables { rules, below }
    }

    /// Drops cards that are interchangeable with a lower-ranked card of
    /// `moves`: same class, no live card ranked between them, equal points
    /// (any points in Null, where only tricks count).
    #[inline]
    pub fn representatives(&self, moves: CardSet, live: CardSet) -> CardSet {
        let null = self.rules.game == GameType::Null;
        let mut keep = moves;
        for c in moves {
            let lower = moves & self.below[c.index() as usize];
            // nearest lower move
            let Some(d) = lower.iter().max_by_key(|&d| self.rules.power(d)) else {
                continue;
            };
            let between = self.below[c.index() as usize] - self.below[d.index() as usize] - CardSet::from(d);
            if !between.intersects(live) && (null || c.points() == d.points()) {
                keep.remove(c);
            }
        }
        keep
    }

    /// Candidate order: promising moves first.
    pub fn order(&self, moves: CardSet, trick: &TrickState, mover_is_declarer: bool, declarer: Seat) -> Moves {
        let r = &self.rules;
        let mut scored: [(i32, Card); 32] = [(0, Card::from_index(0)); 32];
        let mut n = 0;
        let winner = trick.current_winner(r);
        let best = winner.map(|_| {
            let cs = trick.cards();
            let mut b = cs[0];
            for &c in &cs[1..] {
                if r.beats(c, b) {
                    b = c;
                }
            }
            b
        });
        for c in moves {
            let pts = c.points() as i32;
            let trump = r.trump.contains(c) as i32;
            let score = match (winner, best) {
                (Some(w), Some(b)) => {
                    let friend = (w == declarer) == mover_is_declarer;
                    if friend && !r.beats(c, b) {
                        100 + pts
                    } else if !friend && r.beats(c, b) {
                        200 - r.power(c) as i32 + pts - 8 * trump
                    } else if friend {
                        60 + pts - r.power(c) as i32
                    } else {
                        50 - pts - 8 * trump
                    }
                }
                _ => r.power(c) as i32 * 4 + pts + 40 * trump,
            };
            scored[n] = (score, c);
            n += 1;
        }
        let s = &mut scored[..n];
        s.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.index().cmp(&b.1.index())));
        let mut m = Moves::new();
        for &(_, c) in s.iter() {
            m.push(c);
        }
        m
    }
}

#[inline]
pub(crate) fn key(hands: &[CardSet; 3], leader: Seat) -> u128 {
    hands[0].0 as u128 | (hands[1].0 as u128) << 32 | (hands[2].0 as u128) << 64 | (leader.0 as u128) << 96
}

const TT_LIMIT: usize = 1 << 22;

/// Open-card solver for one game and declarer; reusable across positions of
/// that game.
pub struct Solver {
    t: Tables,
    declarer: Seat,
    prune: bool,
    tt: FxHashMap<u128, (u8, u8)>,
    null_tt: FxHashMap<u128, bool>,
    nodes: u64,
}

impl Solver {
    pub fn new(game: GameType, declarer: Seat) -> Solver {
        Solver {
            t: Tables::new(game),
            declarer,
            prune: true,
            tt: FxHashMap::default(),
            null_tt: FxHashMap::default(),
            nodes: 0,
        }
    }

    /// Same search without transposition table or card equivalence.
    pub fn without_pruning(game: GameType, declarer: Seat) -> Solver {
        Solver {
            prune: false,
            ..Solver::new(game, declarer)
        }
    }

    pub fn for_position(pos: &SearchPosition) -> Solver {
        Solver::new(pos.game, pos.declarer)
    }

    pub fn nodes(&self) -> u64 {
        self.nodes
    }

    fn assert_matches(&self, pos: &SearchPosition) {
        assert!(
            pos.game == self.t.rules.game && pos.declarer == self.declarer,
            "solver built for another game"
        );
    }

    /// Whether the declarer ends with more than `limit` points.
    pub fn decide(&mut self, pos: &SearchPosition, limit: u32) -> bool {
        self.assert_matches(pos);
        let need = limit as i32 - (pos.aspts + pos.skat.points()) as i32;
        let mut hands = pos.hands;
        let mut trick = pos.trick;
        self.search(&mut hands, &mut trick, need)
    }

    /// Declarer's final points under optimal play by everyone.
    pub fn value(&mut self, pos: &SearchPosition) -> u32 {
        let mut lo = pos.aspts + pos.skat.points();
        let mut hi = lo + pos.points_in_play();
        // invariant: value in [lo, hi]
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.decide(pos, mid - 1) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        lo
    }

    /// Optimal card for the seat to move and the resulting value; ties go
    /// to the lowest bit index.
    pub fn best_card(&mut self, pos: &SearchPosition) -> (Card, u32) {
        let v = self.value(pos);
        let maximizing = pos.to_move() == self.declarer;
        let legal = pos.legal();
        for c in legal {
            let child = pos.play_with(&self.t.rules, c).expect("legal move");
            let ok = if maximizing {
                v == 0 || self.decide(&child, v - 1)
            } else {
                !self.decide(&child, v)
            };
            if ok {
                return (c, v);
            }
        }
        unreachable!("some move attains the value")
    }

    /// Whether the Null declarer can stay without a trick.
    pub fn null_safe(&mut self, pos: &SearchPosition) -> bool {
        self.assert_matches(pos);
        if pos.declarer_tricks > 0 {
            return false;
        }
        let mut hands = pos.hands;
        let mut trick = pos.trick;
        self.null_search(&mut hands, &mut trick)
    }

    fn search(&mut self, hands: &mut [CardSet; 3], trick: &mut TrickState, need: i32) -> bool {
        if need < 0 {
            return true;
        }
        let left = (hands[0] | hands[1] | hands[2]).points() + trick.points();
        if left as i32 <= need {
            return false;
        }
        self.nodes += 1;
        let at_start = trick.is_empty();
        let k = if at_start && self.prune {
            let k = key(hands, trick.leader);
            if let Some(&(lo, hi)) = self.tt.get(&k) {
                if lo as i32 > need {
                    return true;
                }
                if hi as i32 <= need {
                    return false;
                }
            }
            Some(k)
        } else {
            None
        };
        let s = trick.to_move();
        let maximizing = s == self.declarer;
        let mut moves = self.t.rules.playable(hands[s.index()], trick.lead());
        if self.prune {
            let live = hands[0] | hands[1] | hands[2] | trick.card_set();
            moves = self.t.representatives(moves, live);
        }
        let order = self.t.order(moves, trick, maximizing, self.declarer);
        let mut result = !maximizing;
        for &c in order.as_slice() {
            hands[s.index()].remove(c);
            let r = if trick.len() == 2 {
                let cs = trick.cards();
                let w = self.t.rules.winning_index([cs[0], cs[1], c]);
                let winner = Seat((trick.leader.0 + w as u8) % 3);
                let pts = (trick.points() + c.points() as u32) as i32;
                let need2 = if winner == self.declarer { need - pts } else { need };
                let mut next = TrickState::new(winner);
                self.search(hands, &mut next, need2)
            } else {
                let saved = *trick;
                trick.push(c);
                let r = self.search(hands, trick, need);
                *trick = saved;
                r
            };
            hands[s.index()].insert(c);
            if r == maximizing {
                result = r;
                break;
            }
        }
        if let Some(k) = k {
            if self.tt.len() >= TT_LIMIT {
                self.tt.clear();
            }
            let e = self.tt.entry(k).or_insert((0, left as u8));
            if result {
                e.0 = e.0.max((need + 1) as u8);
            } else {
                e.1 = e.1.min(need as u8);
            }
        }
        result
    }

    fn null_search(&mut self, hands: &mut [CardSet; 3], trick: &mut TrickState) -> bool {
        if hands.iter().all(|h| h.is_empty()) && trick.is_empty() {
            return true;
        }
        self.nodes += 1;
        let k = if trick.is_empty() && self.prune {
            let k = key(hands, trick.leader);
            if let Some(&r) = self.null_tt.get(&k) {
                return r;
            }
            Some(k)
        } else {
            None
        };
        let s = trick.to_move();
        let maximizing = s == self.declarer;
        let mut moves = self.t.rules.playable(hands[s.index()], trick.lead());
        if self.prune {
            let live = hands[0] | hands[1] | hands[2] | trick.card_set();
            moves = self.t.representatives(moves, live);
        }
        let mut result = !maximizing;
        for c in moves {
            hands[s.index()].remove(c);
            let r = if trick.len() == 2 {
                let cs = trick.cards();
                let w = self.t.rules.winning_index([cs[0], cs[1], c]);
                let winner = Seat((trick.leader.0 + w as u8) % 3);
                if winner == self.declarer {
                    false
                } else {
                    let mut next = TrickState::new(winner);
                    self.null_search(hands, &mut next)
                }
            } else {
                let saved = *trick;
                trick.push(c);
                let r = self.null_search(hands, trick);
                *trick = saved;
                r
            };
            hands[s.index()].insert(c);
            if r == maximizing {
                result = r;
                break;
            }
        }
        if let Some(k) = k {
            if self.null_tt.len() >= TT_LIMIT {
                self.null_tt.clear();
            }
            self.null_tt.insert(k, result);
        }
        result
    }
}

pub fn dd_decide(pos: &SearchPosition, limit: u32) -> bool {
    Solver::for_position(pos).decide(pos, limit)
}

pub fn dd_value(pos: &SearchPosition) -> u32 {
    Solver::for_position(pos).value(pos)
}

pub fn dd_null(pos: &SearchPosition) -> bool {
    Solver::for_position(pos).null_safe(pos)
}

pub fn dd_best_card(pos: &SearchPosition) -> (Card, u32) {
    Solver::for_position(pos).best_card(pos)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::{cards, Suit};

    fn c(s: &str) -> Card {
        s.parse().unwrap()
    }

    /// One trick left, seat 0 declarer on lead.
    fn last_trick(dec: &str, o1: &str, o2: &str, aspts: u32) -> SearchPosition {
        let hands = [cards(dec), cards(o1), cards(o2)];
        let skat = cards("D9 DK");
        let rest = CardSet::DECK - hands[0] - hands[1] - hands[2] - skat;
        // aspts here includes the skat
        let gspts = 120 - aspts - hands.iter().map(|h| h.points()).sum::<u32>();
        SearchPosition {
            game: GameType::Suit(Suit::Hearts),
            declarer: Seat(0),
            hands,
            skat,
            trick: TrickState::new(Seat(0)),
            played: rest,
            aspts: aspts - skat.points(),
            gspts,
            declarer_tricks: 5,
            opponent_tricks: 4,
        }
    }

    #[test]
    fn single_trick_strict_limit() {
        let p = last_trick("DA", "D7", "D8", 55);
        p.check().unwrap();
        assert!(dd_decide(&p, 60));
        let p = last_trick("DA", "D7", "D8", 49);
        assert!(!dd_decide(&p, 60));
        assert_eq!(dd_value(&p), 60);
        assert!(!dd_decide(&p, 120));
    }

    #[test]
    fn forced_move_is_best() {
        let p = last_trick("DA", "D7", "D8", 49);
        assert_eq!(dd_best_card(&p), (c("DA"), 60));
    }

    #[test]
    fn terminal_value() {
        let p = last_trick("DA", "D7", "D8", 49);
        let p = p.play(c("DA")).unwrap().play(c("D7")).unwrap().play(c("D8")).unwrap();
        assert!(p.is_over());
        assert_eq!(dd_value(&p), 60);
    }

    #[test]
    fn illegal_plays_rejected() {
        let p = last_trick("DA", "D7", "D8", 49);
        assert!(matches!(p.play(c("D7")), Err(PlayError::NotInHand { .. })));
    }

    #[test]
    fn representatives_need_equal_points_and_no_live_separator() {
        let t = Tables::new(GameType::Grand);
        // A and T are adjacent in the plain order but differ in points
        let moves = cards("SA ST");
        assert_eq!(t.representatives(moves, moves), moves);
        // 9 and 7 with the 8 gone collapse to the 7
        let moves = cards("S9 S7");
        assert_eq!(t.representatives(moves, moves), cards("S7"));
        // ... but not while the 8 is still out
        assert_eq!(t.representatives(moves, moves | cards("S8")), moves);
        // jacks are all worth two
        let moves = cards("CJ SJ");
        assert_eq!(t.representatives(moves, moves), cards("SJ"));
    }
}
