//! Seat policy: card choice by priority (killer, endgame vote, hope card,
//! expert rules) under a time budget, plus heuristic bidding, game choice
//! and discarding.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardSet, Rank, Suit};
use crate::endgame::{endgame_tally, VoteConfig, VoteTally};
use crate::error::SearchError;
use crate::kbps::{avoid_schneider, killer_card, scan_order, AssignmentConstraint, Budget, Prover};
use crate::knowledge::{Heuristics, KnowledgeView};
use crate::rules::{bid_ladder, matadors, trump_set, Contract, GameType, Level, Rules, Seat};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    /// Own card number (1..=10) from which approximate search runs.
    pub akbps_start_card: u32,
    /// Own card number from which exact search runs.
    pub kbps_start_card: u32,
    /// Completed tricks before the endgame vote is tried regardless of the
    /// world count.
    pub endgame_start_trick: u32,
    pub world_cap: usize,
    pub confidence: f64,
    pub decision_budget_ms: u64,
    pub heuristics: Heuristics,
    /// Largest number of unlocated cards of one class on one hand in
    /// approximate search.
    pub imbalance_cap: u8,
    pub kbps_declarer: bool,
    pub kbps_opponents: bool,
    pub vote_point_weight: f64,
    pub vote_level_weight: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            akbps_start_card: 6,
            kbps_start_card: 9,
            endgame_start_trick: 5,
            world_cap: 2500,
            confidence: 0.90,
            decision_budget_ms: 5000,
            heuristics: Heuristics::PLAY,
            imbalance_cap: crate::kbps::DEFAULT_IMBALANCE_CAP,
            kbps_declarer: true,
            kbps_opponents: true,
            vote_point_weight: 1.0,
            vote_level_weight: 0.01,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("kbps start card {kbps} precedes the approximate start card {akbps}")]
    StartOrder { akbps: u32, kbps: u32 },
    #[error("decision budget must be positive")]
    NoBudget,
    #[error("confidence {0} outside 0..=1")]
    Confidence(String),
    #[error("world cap must be positive")]
    NoWorlds,
}

impl PolicyConfig {
    /// Defaults with the exact start three cards after the approximate one.
    pub fn with_start(akbps_start_card: u32) -> PolicyConfig {
        PolicyConfig {
            akbps_start_card,
            kbps_start_card: akbps_start_card + 3,
            ..PolicyConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.kbps_start_card < self.akbps_start_card {
            return Err(ConfigError::StartOrder {
                akbps: self.akbps_start_card,
                kbps: self.kbps_start_card,
            });
        }
        if self.decision_budget_ms == 0 {
            return Err(ConfigError::NoBudget);
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(ConfigError::Confidence(self.confidence.to_string()));
        }
        if self.world_cap == 0 {
            return Err(ConfigError::NoWorlds);
        }
        Ok(())
    }

    pub fn budget(&self) -> Duration {
        Duration::from_millis(self.decision_budget_ms)
    }

    pub fn vote(&self) -> VoteConfig {
        VoteConfig {
            world_cap: self.world_cap,
            confidence: self.confidence,
            point_weight: self.vote_point_weight,
            level_weight: self.vote_level_weight,
            ..VoteConfig::default()
        }
    }

    fn kbps_for(&self, declarer: bool) -> bool {
        if declarer {
            self.kbps_declarer
        } else {
            self.kbps_opponents
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Killer,
    Endgame,
    Hope,
    Expert,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub card: Card,
    pub source: Source,
    /// Proven level for killer cards: the declarer's highest proven level,
    /// or the level the defence holds the declarer below.
    pub proof: Option<Level>,
    /// Whether the proof covered only the worlds admitted by the imbalance cap.
    #[serde(default)]
    pub approximate: bool,
    pub ratio: Option<f64>,
    /// A search stage ran out of time and was skipped.
    #[serde(default)]
    pub time_pressure: bool,
}

impl Recommendation {
    fn expert(card: Card, time_pressure: bool) -> Recommendation {
        Recommendation {
            card,
            source: Source::Expert,
            proof: None,
            approximate: false,
            ratio: None,
            time_pressure,
        }
    }
}

/// Number of the card the seat is about to play, 1..=10.
pub fn card_number(view: &KnowledgeView) -> u32 {
    11 - view.own().len()
}

fn remaining(deadline: Instant) -> Duration {
    deadline.saturating_duration_since(Instant::now())
}

/// Picks a card for the seat to move in `view`. Always returns a legal card.
pub fn choose_card(view: &KnowledgeView, contract: &Contract, config: &PolicyConfig, deadline: Instant) -> Recommendation {
    let legal = Rules::new(view.game).playable(view.own(), view.trick.lead());
    let fallback = || expert_fallback(view);
    if legal.len() <= 1 {
        return Recommendation::expert(fallback(), false);
    }
    let view = view.clone().with_heuristics(config.heuristics);
    let proof_view = view.clone().with_heuristics(Heuristics {
        conventions: false,
        ..config.heuristics
    });
    let limit = contract.limit().unwrap_or(0) as u32;
    let declarer = view.is_declarer();
    let mut pressure = false;

    if view.game.is_trump_game() && config.kbps_for(declarer) {
        match killer_stage(&proof_view, limit, config, deadline) {
            Ok(Some(r)) => return r,
            Ok(None) => {}
            Err(_) => pressure = true,
        }
    }

    let tricks = view.tricks_done();
    if tricks >= config.endgame_start_trick || view.count_worlds() <= config.world_cap as u128 {
        let vote = config.vote();
        match endgame_tally(&view, limit, &vote, Budget::until(deadline)) {
            Ok(tally) => {
                if let Some(r) = from_tally(&tally, &vote) {
                    return Recommendation { time_pressure: pressure, ..r };
                }
                let lost_everywhere = tally.cards.iter().all(|t| t.wins == 0);
                if lost_everywhere && !declarer && config.kbps_opponents && view.game.is_trump_game() && !tally.truncated {
                    let budget = Budget::until(Instant::now() + remaining(deadline) / 2);
                    match avoid_schneider(&proof_view, budget) {
                        Ok(Some(k)) => {
                            return Recommendation {
                                card: k.card,
                                source: Source::Killer,
                                proof: Some(k.level),
                                approximate: false,
                                ratio: None,
                                time_pressure: pressure,
                            }
                        }
                        Ok(None) => {}
                        Err(_) => pressure = true,
                    }
                }
            }
            Err(_) => pressure = true,
        }
    }
    Recommendation::expert(fallback(), pressure)
}

/// Exact search from `kbps_start_card`, approximate search from
/// `akbps_start_card` or when the exact search ran out of time. Each gets
/// half of the time left.
fn killer_stage(
    view: &KnowledgeView,
    limit: u32,
    config: &PolicyConfig,
    deadline: Instant,
) -> Result<Option<Recommendation>, SearchError> {
    let n = card_number(view);
    let mut aborted = false;
    let found = |k: crate::kbps::Killer, approximate: bool| Recommendation {
        card: k.card,
        source: Source::Killer,
        proof: Some(k.level),
        approximate,
        ratio: None,
        time_pressure: false,
    };
    if n >= config.kbps_start_card {
        let budget = Budget::until(Instant::now() + remaining(deadline) / 2);
        let mut p = Prover::new(view, None, budget)?;
        match killer_card(&mut p, limit) {
            Ok(Some(k)) => return Ok(Some(found(k, false))),
            Ok(None) => return Ok(None),
            Err(SearchError::Aborted(_)) => aborted = true,
            Err(e) => return Err(e),
        }
    }
    if n >= config.akbps_start_card && (n < config.kbps_start_card || aborted) {
        let budget = Budget::until(Instant::now() + remaining(deadline) / 2);
        let constraint = AssignmentConstraint::imbalance(config.imbalance_cap);
        let mut p = Prover::new(view, Some(&constraint), budget)?;
        match killer_card(&mut p, limit) {
            Ok(Some(k)) => return Ok(Some(found(k, true))),
            Ok(None) => {}
            Err(SearchError::Aborted(a)) => return Err(a.into()),
            Err(e) => return Err(e),
        }
    }
    if aborted {
        return Err(crate::Aborted.into());
    }
    Ok(None)
}

/// Endgame card when the vote clears the gate, else the hope card when
/// exactly one card wins somewhere.
fn from_tally(tally: &VoteTally, vote: &VoteConfig) -> Option<Recommendation> {
    let best = tally.leader(vote)?;
    if best.ratio() >= vote.confidence {
        return Some(Recommendation {
            card: best.card,
            source: Source::Endgame,
            proof: None,
            approximate: false,
            ratio: Some(best.ratio()),
            time_pressure: false,
        });
    }
    let alive: Vec<_> = tally.cards.iter().filter(|t| t.wins > 0).collect();
    if !tally.truncated && tally.cards.len() > 1 && alive.len() == 1 {
        return Some(Recommendation {
            card: alive[0].card,
            source: Source::Hope,
            proof: None,
            approximate: false,
            ratio: Some(alive[0].ratio()),
            time_pressure: false,
        });
    }
    None
}

/// Cards that no unseen card of the same class can beat.
fn masters(rules: &Rules, cards: CardSet, unseen: CardSet) -> CardSet {
    cards
        .iter()
        .filter(|&c| {
            let class = rules.class_of(c);
            (unseen & class).iter().all(|o| !rules.beats(o, c))
        })
        .collect()
}

fn cheapest(rules: &Rules, cards: CardSet) -> Card {
    cards
        .iter()
        .min_by_key(|&c| (c.points(), rules.trump.contains(c), rules.power(c), c.index()))
        .expect("nonempty")
}

fn dearest(rules: &Rules, cards: CardSet) -> Card {
    cards
        .iter()
        .max_by_key(|&c| (c.points(), !rules.trump.contains(c), std::cmp::Reverse(rules.power(c)), std::cmp::Reverse(c.index())))
        .expect("nonempty")
}

fn weakest_winner(rules: &Rules, cards: CardSet) -> Card {
    cards
        .iter()
        .min_by_key(|&c| (rules.trump.contains(c), rules.power(c), c.points(), c.index()))
        .expect("nonempty")
}

/// Rule-based card: the declarer draws trumps with masters and cashes
/// standing cards; the defence smears points on partner's tricks and gives
/// the declarer's tricks the cheapest card.
pub fn expert_fallback(view: &KnowledgeView) -> Card {
    let rules = Rules::new(view.game);
    let own = view.own();
    let legal = rules.playable(own, view.trick.lead());
    if legal.len() == 1 {
        return legal.first().expect("one card");
    }
    let mut unseen = CardSet::DECK - own - view.played;
    if view.is_declarer() {
        unseen -= view.skat();
    }
    let trump = rules.trump;
    let me = view.seat;
    let last = view.trick.len() == 2;

    let Some(lead) = view.trick.lead() else {
        let standing = masters(&rules, legal, unseen);
        if view.is_declarer() {
            let opp_trumps = unseen & trump;
            let my_trumps = legal & trump;
            if !opp_trumps.is_empty() && !(standing & my_trumps).is_empty() {
                return scan_order(view.game, standing & my_trumps)[0];
            }
            if let Some(&c) = scan_order(view.game, standing).first() {
                if trump.contains(c) || (unseen & trump).is_empty() || view.game == GameType::Null {
                    return c;
                }
            }
            let plain = legal - trump;
            return cheapest(&rules, if plain.is_empty() { legal } else { plain });
        }
        let plain_standing = standing - trump;
        if !plain_standing.is_empty() && view.game != GameType::Null {
            return dearest(&rules, plain_standing);
        }
        let plain = legal - trump;
        return cheapest(&rules, if plain.is_empty() { legal } else { plain });
    };

    let winner = view.trick.current_winner(&rules).expect("trick started");
    let mut top = lead;
    for &c in view.trick.cards() {
        if rules.beats(c, top) {
            top = c;
        }
    }
    let beating: CardSet = legal.iter().filter(|&c| rules.beats(c, top)).collect();
    let friendly = |s: Seat| s == me || (s != view.declarer && !view.is_declarer());

    if view.game == GameType::Null {
        // declarer ducks under; the defence overtakes nothing
        let under = legal - beating;
        return if under.is_empty() {
            weakest_winner(&rules, legal)
        } else {
            under.iter().max_by_key(|&c| rules.power(c)).expect("nonempty")
        };
    }

    if friendly(winner) {
        let safe = last || masters(&rules, CardSet::from(top), unseen - legal).contains(top);
        return if safe { dearest(&rules, legal) } else { cheapest(&rules, legal) };
    }
    if !beating.is_empty() {
        let standing = masters(&rules, beating, unseen);
        if last {
            return weakest_winner(&rules, beating);
        }
        if !standing.is_empty() {
            return weakest_winner(&rules, standing);
        }
    }
    cheapest(&rules, legal)
}

fn jack_weight(c: Card) -> i32 {
    match c.suit() {
        Suit::Clubs => 5,
        Suit::Spades => 4,
        _ => 3,
    }
}

/// Heuristic hand strength for a trump game; higher is better. Cards of
/// `skat` count with their points.
pub fn hand_strength(hand: CardSet, game: GameType, skat: CardSet) -> i32 {
    let trump = trump_set(game);
    let mut s: i32 = 0;
    for c in hand & CardSet::JACKS {
        s += jack_weight(c);
    }
    if let GameType::Suit(t) = game {
        for c in hand & (t.mask() - CardSet::JACKS) {
            s += match c.rank() {
                Rank::Ace => 3,
                Rank::Ten => 2,
                _ => 1,
            };
        }
    }
    for suit in Suit::ALL {
        let cards = hand & (suit.mask() - trump);
        if matches!(game, GameType::Suit(t) if t == suit) {
            continue;
        }
        let has = |r: Rank| cards.contains(Card::new(suit, r));
        if has(Rank::Ace) {
            s += 3;
            if has(Rank::Ten) {
                s += 2;
            }
        } else if has(Rank::Ten) {
            s += if cards.len() >= 2 { 1 } else { -1 };
        }
        if cards.is_empty() && game != GameType::Grand {
            s += 2;
        }
    }
    s + skat.points() as i32 / 4
}

const TRUMP_GAMES: [GameType; 5] = [
    GameType::Grand,
    GameType::Suit(Suit::Clubs),
    GameType::Suit(Suit::Spades),
    GameType::Suit(Suit::Hearts),
    GameType::Suit(Suit::Diamonds),
];

/// Whether the heuristic would play `game` with `hand`.
pub fn playable_game(hand: CardSet, game: GameType, skat: CardSet) -> bool {
    let s = hand_strength(hand, game, skat);
    let jacks = (hand & CardSet::JACKS).len();
    match game {
        GameType::Grand => (jacks >= 3 && s >= 20) || (jacks == 2 && s >= 24),
        GameType::Suit(_) => (hand & trump_set(game)).len() >= 5 && s >= 17,
        GameType::Null => false,
    }
}

/// Game value assuming a plain win with the matadors of `cards`.
pub fn estimated_value(cards: CardSet, game: GameType) -> u32 {
    let (_, m) = matadors(cards, game);
    game.base_value() * (m + 1)
}

/// Highest bid the heuristic supports for a ten-card hand; 0 means pass.
pub fn simple_bid(hand: CardSet) -> u32 {
    TRUMP_GAMES
        .iter()
        .filter(|&&g| playable_game(hand, g, CardSet::EMPTY))
        .map(|&g| estimated_value(hand, g))
        .max()
        .unwrap_or(0)
}

/// Auction move for `hand` facing the current highest bid.
pub fn bid_action(hand: CardSet, current: u32) -> Option<u32> {
    let max = simple_bid(hand);
    bid_ladder().into_iter().find(|&v| v > current).filter(|&v| v <= max)
}

/// All two-card discards from a twelve-card holding.
pub fn discard_candidates(cards: CardSet) -> Vec<CardSet> {
    let cs: Vec<Card> = cards.iter().collect();
    let mut out = Vec::with_capacity(66);
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            out.push(CardSet::from(cs[i]).with(cs[j]));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameChoice {
    pub game: GameType,
    pub discard: [Card; 2],
    pub strength: i32,
    /// Number of discards evaluated.
    pub evaluated: usize,
}

/// Best game and discard for twelve cards at `bid`. Games worth less than
/// the bid are avoided when possible.
pub fn pick_game(cards: CardSet, bid: u32) -> GameChoice {
    let discards = discard_candidates(cards);
    let mut best: Option<(bool, bool, u32, i32, GameType, CardSet)> = None;
    for &d in &discards {
        let hand = cards - d;
        for g in TRUMP_GAMES {
            if !(d & CardSet::JACKS).is_empty() || (g != GameType::Grand && !(d & trump_set(g)).is_empty()) {
                continue;
            }
            let value = estimated_value(cards, g);
            let playable = playable_game(hand, g, d);
            let s = hand_strength(hand, g, d);
            let key = (value >= bid, playable, if playable { value } else { 0 }, s, g, d);
            let better = match &best {
                None => true,
                Some(b) => (key.0, key.1, key.2, key.3) > (b.0, b.1, b.2, b.3),
            };
            if better {
                best = Some(key);
            }
        }
    }
    let (_, _, _, strength, game, d) = best.unwrap_or_else(|| {
        // only jacks and trumps to lay away: grand, lowest two
        let d = discard_candidates(cards)[0];
        (true, false, 0, 0, GameType::Grand, d)
    });
    let mut it = d.iter();
    GameChoice {
        game,
        discard: [it.next().expect("two"), it.next().expect("two")],
        strength,
        evaluated: discards.len(),
    }
}

/// Best two cards to lay away for a fixed `game`.
pub fn best_discard(cards: CardSet, game: GameType) -> [Card; 2] {
    let protected = if game.is_trump_game() { trump_set(game) } else { CardSet::EMPTY };
    let mut best: Option<(i32, CardSet)> = None;
    for d in discard_candidates(cards) {
        if d.intersects(protected) && (cards - protected).len() >= 2 {
            continue;
        }
        let s = match game {
            GameType::Null => null_safety(cards - d),
            g => hand_strength(cards - d, g, d),
        };
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, d));
        }
    }
    let d = best.expect("66 candidates").1;
    let mut it = d.iter();
    [it.next().expect("two"), it.next().expect("two")]
}

/// Rough null strength: low cards and short suits are good.
fn null_safety(hand: CardSet) -> i32 {
    let rules = Rules::new(GameType::Null);
    let mut s = 0;
    for suit in Suit::ALL {
        let mut held: Vec<Card> = (hand & suit.mask()).iter().collect();
        held.sort_by_key(|&c| rules.power(c));
        for (i, &c) in held.iter().enumerate() {
            // each lower card of the same suit guards roughly two ranks
            s -= (rules.power(c) as i32 - 2 * i as i32).max(0);
        }
    }
    s
}
