//! Per-seat knowledge about card locations.
//!
//! A view keeps, for every card that is neither in the seat's own hand nor
//! played, the set of places it may still be: one of the other hands or the
//! skat. The classic named sets (`pool`, the per-hand sets, `skat`,
//! `declarerorskat`, `partnerorskat`) are projections of those masks.
//!
//! Two heuristic layers sit on top of the rule-derived sets and can be
//! switched off for sound reasoning:
//! * `noskat`: cards assumed not to have been left in the skat (all trumps
//!   and aces by default);
//! * playing conventions: an opponent smears the highest value onto a trick
//!   their partner wins and the lowest value onto a declarer trick.
//!
//! If a heuristic contradicts an observation the heuristic layer is dropped
//! and the view continues with rule-derived sets only.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::cards::{Card, CardSet};
use crate::error::KnowledgeError;
use crate::placement::{Belief, LocMask, LOCATIONS, SKAT};
use crate::rules::{trump_set, GameType, Rules, Seat, TrickState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Heuristics {
    pub noskat: bool,
    pub conventions: bool,
}

impl Heuristics {
    /// Rule-derived knowledge only.
    pub const SOUND: Heuristics = Heuristics {
        noskat: false,
        conventions: false,
    };
    /// Everything on, as used for card play.
    pub const PLAY: Heuristics = Heuristics {
        noskat: true,
        conventions: true,
    };
}

impl Default for Heuristics {
    fn default() -> Heuristics {
        Heuristics {
            noskat: true,
            conventions: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Declarer,
    Opponent,
}

/// One complete placement of every unplayed card.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct World {
    pub hands: [CardSet; 3],
    pub skat: CardSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnowledgeView {
    pub seat: Seat,
    pub declarer: Seat,
    pub game: GameType,
    /// Rule-derived candidate sets per location; `maybe[seat]` is the own hand.
    maybe: [CardSet; LOCATIONS],
    /// All cards played so far, including the cards of the current trick.
    pub played: CardSet,
    pub trick: TrickState,
    /// Cards currently held by each seat.
    pub remaining: [u8; 3],
    /// Declarer points; includes the skat once this seat knows it.
    pub aspts: u32,
    pub gspts: u32,
    pub declarer_tricks: u8,
    pub noskat: CardSet,
    /// Convention-derived cards a seat is assumed not to hold.
    pub unlikely: [CardSet; 3],
    pub heuristics: Heuristics,
    /// Set once an observation contradicted a heuristic.
    pub heuristics_dropped: bool,
    /// Skat points already included in `aspts`.
    skat_credit: Option<u32>,
}

impl KnowledgeView {
    /// Initial knowledge of `seat` holding `hand`. `skat_if_known` is the
    /// declarer's skat (the two put-away cards) after pick-up.
    pub fn init(
        seat: Seat,
        hand: CardSet,
        game: GameType,
        declarer: Seat,
        skat_if_known: Option<CardSet>,
        forehand: Seat,
    ) -> Result<KnowledgeView, KnowledgeError> {
        if hand.len() != 10 {
            return Err(KnowledgeError::HandSize {
                expected: 10,
                got: hand.len(),
            });
        }
        let mut maybe = [CardSet::EMPTY; LOCATIONS];
        maybe[seat.index()] = hand;
        let mut aspts = 0;
        let mut skat_credit = None;
        let mut noskat = trump_set(game) | CardSet::ACES;
        let unknown = match skat_if_known {
            Some(skat) => {
                if seat != declarer {
                    return Err(KnowledgeError::InconsistentObservation {
                        actor: seat,
                        card: skat.first().unwrap_or(Card::from_index(0)),
                        reason: "only the declarer sees the skat",
                    });
                }
                if skat.len() != 2 {
                    return Err(KnowledgeError::SkatSize(skat.len()));
                }
                if skat.intersects(hand) {
                    return Err(KnowledgeError::Overlap(skat & hand));
                }
                maybe[SKAT] = skat;
                aspts = skat.points();
                skat_credit = Some(aspts);
                noskat -= skat;
                CardSet::DECK - hand - skat
            }
            None => {
                maybe[SKAT] = CardSet::DECK - hand;
                CardSet::DECK - hand
            }
        };
        for s in Seat::ALL {
            if s != seat {
                maybe[s.index()] = unknown;
            }
        }
        Ok(KnowledgeView {
            seat,
            declarer,
            game,
            maybe,
            played: CardSet::EMPTY,
            trick: TrickState::new(forehand),
            remaining: [10; 3],
            aspts,
            gspts: 0,
            declarer_tricks: 0,
            noskat,
            unlikely: [CardSet::EMPTY; 3],
            heuristics: Heuristics::default(),
            heuristics_dropped: false,
            skat_credit,
        })
    }

    /// View of `seat` with every card located as in `pos`.
    pub fn open(pos: &crate::solver::SearchPosition, seat: Seat) -> KnowledgeView {
        let mut maybe = [CardSet::EMPTY; LOCATIONS];
        for s in Seat::ALL {
            maybe[s.index()] = pos.hands[s.index()];
        }
        maybe[SKAT] = pos.skat;
        let declarer = seat == pos.declarer;
        let skat_credit = declarer.then(|| pos.skat.points());
        let played = pos.played | pos.trick.card_set();
        KnowledgeView {
            seat,
            declarer: pos.declarer,
            game: pos.game,
            maybe,
            played,
            trick: pos.trick,
            remaining: pos.hands.map(|h| h.len() as u8),
            aspts: pos.aspts + skat_credit.unwrap_or(0),
            gspts: pos.gspts,
            declarer_tricks: pos.declarer_tricks,
            noskat: (trump_set(pos.game) | CardSet::ACES) - played - if declarer { pos.skat } else { CardSet::EMPTY },
            unlikely: [CardSet::EMPTY; 3],
            heuristics: Heuristics::SOUND,
            heuristics_dropped: false,
            skat_credit,
        }
    }

    pub fn with_heuristics(mut self, heuristics: Heuristics) -> KnowledgeView {
        self.heuristics = heuristics;
        self
    }

    pub fn role(&self) -> Role {
        if self.seat == self.declarer {
            Role::Declarer
        } else {
            Role::Opponent
        }
    }

    pub fn is_declarer(&self) -> bool {
        self.seat == self.declarer
    }

    /// The other opponent, for opponent views.
    pub fn partner(&self) -> Option<Seat> {
        (!self.is_declarer()).then(|| {
            Seat::ALL
                .into_iter()
                .find(|&s| s != self.seat && s != self.declarer)
                .unwrap()
        })
    }

    pub fn own(&self) -> CardSet {
        self.maybe[self.seat.index()]
    }

    pub fn skat_known(&self) -> bool {
        self.skat_credit.is_some()
    }

    /// Declarer points won in tricks, without any skat credit.
    pub fn trick_aspts(&self) -> u32 {
        self.aspts - self.skat_credit.unwrap_or(0)
    }

    /// Tricks completed so far.
    pub fn tricks_done(&self) -> u32 {
        (self.played.len() - self.trick.len() as u32) / 3
    }

    fn mask_of(&self, card: Card) -> LocMask {
        let mut m = 0;
        for l in 0..LOCATIONS {
            if self.maybe[l].contains(card) {
                m |= 1 << l;
            }
        }
        m
    }

    fn others(&self) -> [Seat; 2] {
        let a = self.seat.next();
        [a, a.next()]
    }

    fn unknown(&self) -> CardSet {
        CardSet::DECK - self.played - self.own()
    }

    fn noskat_moves(&self, card: Card) -> bool {
        self.heuristics.noskat && self.noskat.contains(card)
    }

    fn select(&self, pred: impl Fn(Card, LocMask) -> bool) -> CardSet {
        self.unknown().iter().filter(|&c| pred(c, self.mask_of(c))).collect()
    }

    /// Cards known to be in `seat`'s hand; for the own seat the hand itself.
    pub fn h(&self, seat: Seat) -> CardSet {
        if seat == self.seat {
            return self.own();
        }
        let only = 1 << seat.index();
        let with_skat = only | 1 << SKAT;
        self.select(|c, m| m == only || (m == with_skat && self.noskat_moves(c)))
    }

    /// Cards whose hand is not known to this seat.
    pub fn pool(&self) -> CardSet {
        let [a, b] = self.others();
        let both = (1 << a.index()) | (1 << b.index());
        self.select(|_, m| m & both == both)
    }

    pub fn skat(&self) -> CardSet {
        self.select(|_, m| m == 1 << SKAT)
    }

    /// Cards that are either in `seat`'s hand or in the skat.
    pub fn or_skat(&self, seat: Seat) -> CardSet {
        if seat == self.seat {
            return CardSet::EMPTY;
        }
        let m2 = (1 << seat.index()) | (1 << SKAT);
        self.select(|c, m| m == m2 && !self.noskat_moves(c))
    }

    pub fn declarer_or_skat(&self) -> CardSet {
        self.or_skat(self.declarer)
    }

    pub fn partner_or_skat(&self) -> CardSet {
        self.partner().map(|p| self.or_skat(p)).unwrap_or_default()
    }

    /// Placement problem with rule-derived sets only.
    pub fn sound_belief(&self) -> Belief {
        Belief {
            maybe: self.maybe,
            cap: [self.remaining[0], self.remaining[1], self.remaining[2], 2],
            free: 0b1111 & !(1 << self.seat.index()),
        }
    }

    /// Placement problem with the enabled heuristic layers applied, or the
    /// sound one when the heuristics admit no placement.
    pub fn belief(&self) -> Belief {
        let sound = self.sound_belief();
        if self.heuristics_dropped || (!self.heuristics.noskat && !self.heuristics.conventions) {
            return sound;
        }
        let mut b = sound;
        let seat_union = |b: &Belief, except: usize| {
            let mut u = CardSet::EMPTY;
            for l in 0..LOCATIONS {
                if l != except && b.free & (1 << l) != 0 {
                    u |= b.maybe[l];
                }
            }
            u
        };
        if self.heuristics.noskat {
            let drop = self.noskat & b.maybe[SKAT] & seat_union(&b, SKAT);
            b.maybe[SKAT] -= drop;
        }
        if self.heuristics.conventions {
            for s in Seat::ALL {
                if s == self.seat {
                    continue;
                }
                let l = s.index();
                let drop = self.unlikely[l] & b.maybe[l] & seat_union(&b, l);
                b.maybe[l] -= drop;
            }
        }
        if b.feasible() {
            b
        } else {
            sound
        }
    }

    pub fn count_worlds(&self) -> u128 {
        self.belief().count_worlds()
    }

    fn world_from(&self, placed: &[CardSet; LOCATIONS]) -> World {
        let mut hands = [placed[0], placed[1], placed[2]];
        hands[self.seat.index()] = self.own();
        World {
            hands,
            skat: placed[SKAT],
        }
    }

    /// Consistent worlds in deterministic order (cards by ascending bit,
    /// locations by seat then skat), truncated at `cap`.
    pub fn enumerate_worlds(&self, cap: usize) -> Vec<World> {
        let b = self.belief();
        let mut out = Vec::new();
        b.enumerate(cap, |placed| {
            out.push(self.world_from(placed));
            true
        });
        out
    }

    /// Up to `cap` distinct worlds drawn uniformly, sorted in enumeration
    /// order. Small belief spaces are subsampled from the full enumeration.
    pub fn sample_worlds<R: Rng>(&self, cap: usize, rng: &mut R) -> Vec<World> {
        let b = self.belief();
        let total = b.count_worlds();
        if total <= cap as u128 {
            return self.enumerate_worlds(cap);
        }
        if total <= 1 << 16 {
            let all = self.enumerate_worlds(usize::MAX);
            let mut idx = sample(rng, all.len(), cap).into_vec();
            idx.sort_unstable();
            return idx.into_iter().map(|i| all[i]).collect();
        }
        let mut seen = rustc_hash::FxHashSet::default();
        let mut out = Vec::with_capacity(cap);
        for _ in 0..cap * 4 {
            if out.len() == cap {
                break;
            }
            let Some(placed) = b.sample(rng) else { break };
            if seen.insert(placed) {
                out.push(placed);
            }
        }
        out.sort_by_key(enumeration_key);
        out.iter().map(|p| self.world_from(p)).collect()
    }

    /// Distinct skats over all consistent worlds.
    pub fn possible_skats(&self) -> Vec<CardSet> {
        let b = self.belief();
        let cands = b.maybe[SKAT];
        let fixed = b.located_at(SKAT);
        let mut out = Vec::new();
        let cs: Vec<Card> = cands.iter().collect();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let pair = CardSet::from(cs[i]).with(cs[j]);
                if !fixed.is_subset(pair) {
                    continue;
                }
                let mut t = b;
                t.maybe[SKAT] = pair;
                for l in 0..3 {
                    t.maybe[l] -= pair;
                }
                if t.feasible() {
                    out.push(pair);
                }
            }
        }
        out
    }

    /// Exact location probabilities from world counts.
    pub fn to_probability_matrix(&self) -> Result<ProbabilityMatrix, KnowledgeError> {
        let b = self.belief();
        if !b.feasible() {
            return Err(KnowledgeError::CapacityDeficit);
        }
        let total = b.count_worlds();
        let mut counts = [[0u128; 32]; LOCATIONS];
        for c in self.own() {
            counts[self.seat.index()][c.index() as usize] = total;
        }
        // cards sharing a mask share their marginals
        let mut done: Vec<(LocMask, [u128; LOCATIONS])> = Vec::new();
        for c in b.unplaced() {
            let m = b.mask_of(c) & b.free;
            let row = match done.iter().find(|(dm, _)| *dm == m) {
                Some((_, r)) => *r,
                None => {
                    let mut r = [0u128; LOCATIONS];
                    for (l, slot) in r.iter_mut().enumerate() {
                        if m & (1 << l) != 0 {
                            *slot = b.count_with(c, l);
                        }
                    }
                    done.push((m, r));
                    r
                }
            };
            for l in 0..LOCATIONS {
                counts[l][c.index() as usize] = row[l];
            }
        }
        Ok(ProbabilityMatrix { total, counts })
    }

    /// Records the declarer's hand laid open in an ouvert game.
    pub fn observe_open_hand(&self, seat: Seat, hand: CardSet) -> Result<KnowledgeView, KnowledgeError> {
        let mut v = self.clone();
        if hand.len() != self.remaining[seat.index()] as u32 || !hand.is_subset(self.maybe[seat.index()]) {
            return Err(KnowledgeError::InconsistentObservation {
                actor: seat,
                card: (hand - self.maybe[seat.index()]).first().unwrap_or(Card::from_index(0)),
                reason: "open hand does not fit the known cards",
            });
        }
        for l in 0..LOCATIONS {
            if l == seat.index() {
                v.maybe[l] = hand;
            } else {
                v.maybe[l] -= hand;
            }
        }
        v.validate()?;
        Ok(v)
    }

    /// Records that `actor` played `card` into the current trick.
    pub fn observe_play(&self, actor: Seat, card: Card) -> Result<KnowledgeView, KnowledgeError> {
        let rules = Rules::new(self.game);
        let mut v = self.clone();
        if actor != self.trick.to_move() {
            return Err(KnowledgeError::InconsistentObservation {
                actor,
                card,
                reason: "not this seat's turn",
            });
        }
        if self.played.contains(card) {
            return Err(KnowledgeError::InconsistentObservation {
                actor,
                card,
                reason: "card already played",
            });
        }
        let a = actor.index();
        if !self.maybe[a].contains(card) {
            return Err(KnowledgeError::InconsistentObservation {
                actor,
                card,
                reason: "card is known to be elsewhere",
            });
        }
        if actor == self.seat {
            let legal = rules.playable(self.own(), self.trick.lead());
            if !legal.contains(card) {
                return Err(KnowledgeError::InconsistentObservation {
                    actor,
                    card,
                    reason: "own play does not follow",
                });
            }
        }
        if v.heuristics.conventions && v.unlikely[a].contains(card) {
            v.heuristics_dropped = true;
        }
        // void inference
        if let Some(lead) = self.trick.lead() {
            let class = rules.class_of(lead);
            if !class.contains(card) {
                v.maybe[a] -= class;
            }
        }
        for l in 0..LOCATIONS {
            v.maybe[l].remove(card);
        }
        v.played.insert(card);
        v.noskat.remove(card);
        for u in v.unlikely.iter_mut() {
            u.remove(card);
        }
        v.remaining[a] -= 1;
        v.trick.push(card);

        if v.heuristics.conventions && actor != v.declarer && v.trick.is_complete() {
            v.apply_convention(&rules, actor, card);
        }

        if v.trick.is_complete() {
            let c = v.trick.cards();
            let w = rules.winning_index([c[0], c[1], c[2]]);
            let winner = Seat((v.trick.leader.0 + w as u8) % 3);
            let pts = v.trick.points();
            if winner == v.declarer {
                v.aspts += pts;
                v.declarer_tricks += 1;
            } else {
                v.gspts += pts;
            }
            v.trick = TrickState::new(winner);
            if v.played.len() == 30 && v.skat_credit.is_none() {
                let p = (CardSet::DECK - v.played).points();
                v.aspts += p;
                v.skat_credit = Some(p);
            }
        }

        if !v.sound_belief().feasible() {
            return Err(KnowledgeError::InconsistentObservation {
                actor,
                card,
                reason: "no card placement is consistent with this play",
            });
        }
        if !v.heuristics_dropped
            && (v.heuristics.noskat || v.heuristics.conventions)
            && v.belief() == v.sound_belief()
            && v.heuristic_belief_infeasible()
        {
            v.heuristics_dropped = true;
        }
        Ok(v)
    }

    fn heuristic_belief_infeasible(&self) -> bool {
        // belief() silently falls back; detect whether it had to
        let mut probe = self.clone();
        probe.heuristics_dropped = false;
        let sound = probe.sound_belief();
        let mut b = sound;
        if probe.heuristics.noskat {
            let mut seats = CardSet::EMPTY;
            for l in 0..3 {
                if b.free & (1 << l) != 0 {
                    seats |= b.maybe[l];
                }
            }
            b.maybe[SKAT] -= probe.noskat & b.maybe[SKAT] & seats;
        }
        b != sound && !b.feasible()
    }

    /// Rearhand opponent conventions: full value onto a partner trick,
    /// lowest value onto a declarer trick.
    fn apply_convention(&mut self, rules: &Rules, actor: Seat, card: Card) {
        let Some(lead) = self.trick.lead() else { return };
        let class = rules.class_of(lead);
        if !class.contains(card) {
            return;
        }
        let Some(winner) = self.trick.current_winner(rules) else { return };
        if winner == actor {
            return;
        }
        let live = class - self.played - self.own();
        let p = card.points();
        let unlikely: CardSet = if winner == self.declarer {
            live.iter().filter(|c| c.points() < p).collect()
        } else {
            live.iter().filter(|c| c.points() > p).collect()
        };
        self.unlikely[actor.index()] |= unlikely;
    }

    /// Checks disjointness, coverage and capacity feasibility.
    pub fn validate(&self) -> Result<(), KnowledgeError> {
        let named = self.named_sets();
        let mut seen = CardSet::EMPTY;
        for (_, s) in &named {
            if seen.intersects(*s) {
                return Err(KnowledgeError::Overlap(seen & *s));
            }
            seen |= *s;
        }
        if seen != CardSet::DECK {
            return Err(KnowledgeError::Uncovered(CardSet::DECK - seen));
        }
        if !self.sound_belief().feasible() {
            return Err(KnowledgeError::CapacityDeficit);
        }
        Ok(())
    }

    /// The partition of the deck into named sets.
    fn named_sets(&self) -> Vec<(String, CardSet)> {
        let mut v = vec![("played".to_string(), self.played)];
        for s in Seat::ALL {
            v.push((format!("P{s}"), self.h(s)));
        }
        v.push(("pool".into(), self.pool()));
        v.push(("skat".into(), self.skat()));
        for s in self.others() {
            v.push((format!("P{s}orskat"), self.or_skat(s)));
        }
        v
    }

    /// One named set per line, cards in ascending bit order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, name: &str, set: CardSet| {
            let _ = writeln!(out, "{name} = {{{}}}", set.to_text());
        };
        for s in Seat::ALL {
            line(&mut out, &format!("P{s}"), self.h(s));
        }
        line(&mut out, "pool", self.pool());
        line(&mut out, "skat", self.skat());
        match self.partner() {
            Some(p) => {
                line(&mut out, "declarerorskat", self.or_skat(self.declarer));
                line(&mut out, "partnerorskat", self.or_skat(p));
                line(&mut out, "noskat", self.noskat);
            }
            None if self.skat_credit.is_none() => {
                for s in self.others() {
                    line(&mut out, &format!("P{s}orskat"), self.or_skat(s));
                }
                line(&mut out, "noskat", self.noskat);
            }
            None => {}
        }
        line(&mut out, "played", self.played);
        out
    }

    /// Builds a view from explicit named sets.
    pub fn from_sets(sets: KnowledgeSets) -> Result<KnowledgeView, KnowledgeError> {
        let seat = sets.seat;
        let mut maybe = [CardSet::EMPTY; LOCATIONS];
        maybe[seat.index()] = sets.own;
        let others: Vec<Seat> = Seat::ALL.into_iter().filter(|&s| s != seat).collect();
        let skat_known = sets.skat.len() == 2;
        for &s in &others {
            maybe[s.index()] |= sets.pool | sets.hands[s.index()] | sets.orskat[s.index()];
        }
        maybe[SKAT] = sets.skat;
        if !skat_known {
            maybe[SKAT] |= sets.pool;
        }
        for &s in &others {
            maybe[SKAT] |= sets.orskat[s.index()];
        }
        let skat_credit = (skat_known && (seat == sets.declarer || sets.played.len() == 30)).then(|| sets.skat.points());
        let aspts = sets.aspts + skat_credit.unwrap_or(0);
        let v = KnowledgeView {
            seat,
            declarer: sets.declarer,
            game: sets.game,
            maybe,
            played: sets.played,
            trick: sets.trick,
            remaining: sets.remaining,
            aspts,
            gspts: sets.gspts,
            declarer_tricks: sets.declarer_tricks,
            noskat: sets.noskat,
            unlikely: [CardSet::EMPTY; 3],
            heuristics: sets.heuristics,
            heuristics_dropped: false,
            skat_credit,
        };
        let listed = sets.own
            | sets.played
            | sets.pool
            | sets.skat
            | sets.hands[0]
            | sets.hands[1]
            | sets.hands[2]
            | sets.orskat[0]
            | sets.orskat[1]
            | sets.orskat[2];
        let total = sets.own.len()
            + sets.played.len()
            + sets.pool.len()
            + sets.skat.len()
            + sets.hands.iter().map(|h| h.len()).sum::<u32>()
            + sets.orskat.iter().map(|h| h.len()).sum::<u32>();
        if listed != CardSet::DECK {
            return Err(KnowledgeError::Uncovered(CardSet::DECK - listed));
        }
        if total != 32 || sets.hands[seat.index()].len() + sets.orskat[seat.index()].len() > 0 {
            return Err(KnowledgeError::Overlap(CardSet::EMPTY));
        }
        if sets.own.len() != sets.remaining[seat.index()] as u32 || !sets.trick.card_set().is_subset(sets.played) {
            return Err(KnowledgeError::HandSize {
                expected: sets.remaining[seat.index()] as u32,
                got: sets.own.len(),
            });
        }
        v.validate()?;
        Ok(v)
    }

    pub fn to_sets(&self) -> KnowledgeSets {
        let mut hands = [CardSet::EMPTY; 3];
        let mut orskat = [CardSet::EMPTY; 3];
        for s in self.others() {
            hands[s.index()] = self.h(s);
            orskat[s.index()] = self.or_skat(s);
        }
        KnowledgeSets {
            seat: self.seat,
            declarer: self.declarer,
            game: self.game,
            own: self.own(),
            played: self.played,
            trick: self.trick,
            pool: self.pool(),
            hands,
            skat: self.skat(),
            orskat,
            noskat: self.noskat,
            remaining: self.remaining,
            aspts: self.trick_aspts(),
            gspts: self.gspts,
            declarer_tricks: self.declarer_tricks,
            heuristics: self.heuristics,
        }
    }
}

/// Serializable named-set form of a view.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeSets {
    pub seat: Seat,
    pub declarer: Seat,
    pub game: GameType,
    pub own: CardSet,
    #[serde(default)]
    pub played: CardSet,
    pub trick: TrickState,
    #[serde(default)]
    pub pool: CardSet,
    /// Cards proven on each other hand.
    #[serde(default)]
    pub hands: [CardSet; 3],
    #[serde(default)]
    pub skat: CardSet,
    /// Cards in that seat's hand or in the skat.
    #[serde(default)]
    pub orskat: [CardSet; 3],
    #[serde(default)]
    pub noskat: CardSet,
    pub remaining: [u8; 3],
    /// Declarer trick points; a known skat is credited on load.
    #[serde(default)]
    pub aspts: u32,
    #[serde(default)]
    pub gspts: u32,
    #[serde(default)]
    pub declarer_tricks: u8,
    #[serde(default = "sound")]
    pub heuristics: Heuristics,
}

fn sound() -> Heuristics {
    Heuristics::SOUND
}

impl Default for KnowledgeSets {
    fn default() -> Self {
        KnowledgeSets {
            seat: Seat(0),
            declarer: Seat(0),
            game: GameType::Grand,
            own: CardSet::EMPTY,
            played: CardSet::EMPTY,
            trick: TrickState::new(Seat(0)),
            pool: CardSet::EMPTY,
            hands: [CardSet::EMPTY; 3],
            skat: CardSet::EMPTY,
            orskat: [CardSet::EMPTY; 3],
            noskat: CardSet::EMPTY,
            remaining: [0; 3],
            aspts: 0,
            gspts: 0,
            declarer_tricks: 0,
            heuristics: Heuristics::SOUND,
        }
    }
}

/// `counts[l][card] / total` is the probability of `card` lying at location `l`
/// (0..3 seats, 3 skat).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityMatrix {
    pub total: u128,
    pub counts: [[u128; 32]; LOCATIONS],
}

impl ProbabilityMatrix {
    pub fn p(&self, location: usize, card: Card) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.counts[location][card.index() as usize] as f64 / self.total as f64
    }

    /// Expected number of cards at `location`.
    pub fn expected_count(&self, location: usize) -> f64 {
        (0..32).map(|i| self.p(location, Card::from_index(i))).sum()
    }
}

/// Frequency matrix over an explicit world list, with a per-world weight hook.
pub fn probability_from_worlds(worlds: &[World], weight: impl Fn(&World) -> f64) -> [[f64; 32]; LOCATIONS] {
    let mut m = [[0.0; 32]; LOCATIONS];
    let mut total = 0.0;
    for w in worlds {
        let x = weight(w);
        total += x;
        for (l, set) in w.hands.iter().chain(std::iter::once(&w.skat)).enumerate() {
            for c in *set {
                m[l][c.index() as usize] += x;
            }
        }
    }
    if total > 0.0 {
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v /= total;
            }
        }
    }
    m
}

/// Sort key reproducing `Belief::enumerate` order: for each card ascending,
/// the location it was placed at.
fn enumeration_key(placed: &[CardSet; LOCATIONS]) -> Vec<(u8, u8)> {
    let mut key = Vec::new();
    for (l, set) in placed.iter().enumerate() {
        for c in *set {
            key.push((c.index(), l as u8));
        }
    }
    key.sort_unstable();
    key
}

pub fn init_view(
    seat: Seat,
    hand: CardSet,
    game: GameType,
    declarer: Seat,
    skat_if_known: Option<CardSet>,
    forehand: Seat,
) -> Result<KnowledgeView, KnowledgeError> {
    KnowledgeView::init(seat, hand, game, declarer, skat_if_known, forehand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::cards;
    use crate::cards::Suit;

    fn c(s: &str) -> Card {
        s.parse().unwrap()
    }

    const HEARTS: GameType = GameType::Suit(Suit::Hearts);

    fn p0() -> CardSet {
        cards("HJ DJ HA HK H9 H7 CA C8 C7 SA")
    }
    fn p1() -> CardSet {
        cards("CJ SJ HQ CT CK CQ ST S7 DQ D7")
    }
    fn p2() -> CardSet {
        cards("HT H8 C9 SK SQ S9 S8 DA DT D8")
    }

    #[test]
    fn initial_opponent_view() {
        let v = init_view(Seat(2), p2(), HEARTS, Seat(0), None, Seat(2)).unwrap();
        assert_eq!(v.pool().len(), 22);
        assert_eq!(v.noskat.len(), 14);
        assert_eq!(v.noskat, trump_set(HEARTS) | cards("CA SA DA"));
        assert!(v.h(Seat(0)).is_empty() && v.h(Seat(1)).is_empty());
        v.validate().unwrap();
        assert_eq!(v.clone().with_heuristics(Heuristics::SOUND).possible_skats().len(), 231);
        // noskat keeps the 11 unseen trumps and aces out of the skat
        assert_eq!(v.possible_skats().len(), 55);
    }

    #[test]
    fn wrong_hand_size() {
        let e = init_view(Seat(0), cards("HA"), HEARTS, Seat(0), None, Seat(0));
        assert!(matches!(e, Err(KnowledgeError::HandSize { expected: 10, got: 1 })));
    }

    #[test]
    fn declarer_sees_lead() {
        let v = init_view(Seat(0), p0(), HEARTS, Seat(0), Some(cards("DK D9")), Seat(2)).unwrap();
        assert_eq!(v.aspts, 4);
        let v = v.observe_play(Seat(2), c("DA")).unwrap();
        assert_eq!(v.pool().len(), 19);
        assert_eq!(v.skat(), cards("DK D9"));
        assert!(v.h(Seat(1)).is_empty() && v.h(Seat(2)).is_empty());
        v.validate().unwrap();
    }

    #[test]
    fn opponent_infers_declarer_void() {
        let v = init_view(Seat(1), p1(), HEARTS, Seat(0), None, Seat(2)).unwrap();
        let v = v.observe_play(Seat(2), c("DA")).unwrap();
        let v = v.observe_play(Seat(0), c("HA")).unwrap();
        assert_eq!(v.partner_or_skat(), cards("DT DK D9 D8"));
        assert_eq!(v.pool().len(), 16);
        assert_eq!(v.noskat.len(), 12);
        v.validate().unwrap();
    }

    #[test]
    fn following_with_known_card_changes_only_membership() {
        let v = init_view(Seat(0), p0(), HEARTS, Seat(0), Some(cards("DK D9")), Seat(0)).unwrap();
        let v = v.observe_play(Seat(0), c("SA")).unwrap();
        // seat 1 shows a void in spades: spades move to seat 2
        let v = v.observe_play(Seat(1), c("D7")).unwrap();
        let spades = cards("ST SK SQ S9 S8 S7");
        assert_eq!(v.h(Seat(2)), spades);
        let pool = v.pool();
        let v2 = v.observe_play(Seat(2), c("S7")).unwrap();
        assert_eq!(v2.pool(), pool);
        assert_eq!(v2.h(Seat(2)), spades.without(c("S7")));
    }

    #[test]
    fn rejects_card_proven_elsewhere() {
        let v = init_view(Seat(0), p0(), HEARTS, Seat(0), Some(cards("DK D9")), Seat(1)).unwrap();
        let e = v.observe_play(Seat(1), c("DK"));
        assert!(matches!(e, Err(KnowledgeError::InconsistentObservation { .. })));
        let e = v.observe_play(Seat(2), c("D7"));
        assert!(matches!(e, Err(KnowledgeError::InconsistentObservation { .. })));
    }

    #[test]
    fn counts_match_enumeration() {
        let v = init_view(Seat(0), p0(), HEARTS, Seat(0), Some(cards("DK D9")), Seat(0)).unwrap();
        let v = v.observe_play(Seat(0), c("SA")).unwrap();
        let v = v.observe_play(Seat(1), c("D7")).unwrap();
        let v = v.observe_play(Seat(2), c("S7")).unwrap();
        assert_eq!(v.count_worlds(), v.enumerate_worlds(usize::MAX).len() as u128);
    }

    #[test]
    fn probability_two_cards_two_seats() {
        let mut v = init_view(Seat(0), p0(), HEARTS, Seat(0), Some(cards("DK D9")), Seat(0)).unwrap();
        v.maybe[1] = cards("D7 D8");
        v.maybe[2] = cards("D7 D8");
        v.remaining = [1, 1, 1];
        v.maybe[0] = cards("HA");
        let m = v.to_probability_matrix().unwrap();
        assert_eq!(m.total, 2);
        assert_eq!(m.p(1, c("D7")), 0.5);
        assert_eq!(m.p(2, c("D8")), 0.5);
        assert_eq!(m.expected_count(1), 1.0);
    }
}
