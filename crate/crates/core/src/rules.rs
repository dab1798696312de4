//! Game types, legality, trick resolution and game valuation.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::cards::{Card, CardSet, Rank, Suit};
use crate::error::{ParseError, PlayError, RulesError};

/// Table position 0..3. Play rotates `0 -> 1 -> 2 -> 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seat(pub u8);

impl Seat {
    pub const ALL: [Seat; 3] = [Seat(0), Seat(1), Seat(2)];

    #[inline]
    pub fn next(self) -> Seat {
        Seat((self.0 + 1) % 3)
    }

    #[inline]
    pub fn prev(self) -> Seat {
        Seat((self.0 + 2) % 3)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Seat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameType {
    Grand,
    Suit(Suit),
    Null,
}

impl GameType {
    pub fn is_trump_game(self) -> bool {
        !matches!(self, GameType::Null)
    }

    /// Base value: diamonds 9, hearts 10, spades 11, clubs 12, grand 24, plain null 23.
    pub fn base_value(self) -> u32 {
        match self {
            GameType::Suit(Suit::Diamonds) => 9,
            GameType::Suit(Suit::Hearts) => 10,
            GameType::Suit(Suit::Spades) => 11,
            GameType::Suit(Suit::Clubs) => 12,
            GameType::Grand => 24,
            GameType::Null => 23,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GameType::Grand => "grand",
            GameType::Null => "null",
            GameType::Suit(Suit::Diamonds) => "diamonds",
            GameType::Suit(Suit::Hearts) => "hearts",
            GameType::Suit(Suit::Spades) => "spades",
            GameType::Suit(Suit::Clubs) => "clubs",
        }
    }
}

impl fmt::Display for GameType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameType {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<GameType, ParseError> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "grand" | "g" => GameType::Grand,
            "null" | "n" => GameType::Null,
            "diamonds" | "d" => GameType::Suit(Suit::Diamonds),
            "hearts" | "h" => GameType::Suit(Suit::Hearts),
            "spades" | "s" => GameType::Suit(Suit::Spades),
            "clubs" | "c" => GameType::Suit(Suit::Clubs),
            _ => return Err(ParseError::GameType(s.to_string())),
        })
    }
}

impl Serialize for GameType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for GameType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<GameType, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn trump_set(game: GameType) -> CardSet {
    match game {
        GameType::Grand => CardSet::JACKS,
        GameType::Suit(s) => CardSet::JACKS | s.mask(),
        GameType::Null => CardSet::EMPTY,
    }
}

pub fn card_points(card: Card) -> u8 {
    card.points()
}

/// Per-game lookup tables: the follow class of every card and its strength
/// inside that class.
#[derive(Clone, Debug)]
pub struct Rules {
    pub game: GameType,
    pub trump: CardSet,
    class: [CardSet; 32],
    power: [u8; 32],
}

// Null order 7 8 9 T J Q K A, indexed by rank ordinal (7 8 9 Q K T A J).
const NULL_POWER: [u8; 8] = [0, 1, 2, 5, 6, 3, 7, 4];

impl Rules {
    pub fn new(game: GameType) -> Rules {
        let trump = trump_set(game);
        let mut class = [CardSet::EMPTY; 32];
        let mut power = [0u8; 32];
        for i in 0..32u8 {
            let c = Card::from_index(i);
            let rank = c.rank() as u8;
            if trump.contains(c) {
                class[i as usize] = trump;
                power[i as usize] = if c.is_jack() { 8 + c.suit() as u8 } else { rank };
            } else {
                class[i as usize] = c.suit().mask() - trump;
                power[i as usize] = match game {
                    GameType::Null => NULL_POWER[rank as usize],
                    _ => rank,
                };
            }
        }
        Rules {
            game,
            trump,
            class,
            power,
        }
    }

    /// The set of cards that follow `card` when it is led.
    #[inline]
    pub fn class_of(&self, card: Card) -> CardSet {
        self.class[card.index() as usize]
    }

    /// Strength of a card inside its own class; larger wins.
    #[inline]
    pub fn power(&self, card: Card) -> u8 {
        self.power[card.index() as usize]
    }

    #[inline]
    pub fn playable(&self, hand: CardSet, lead: Option<Card>) -> CardSet {
        match lead {
            None => hand,
            Some(l) => {
                let follow = hand & self.class_of(l);
                if follow.is_empty() {
                    hand
                } else {
                    follow
                }
            }
        }
    }

    /// Whether `challenger` beats `holder` given the lead card of the trick.
    #[inline]
    pub fn beats(&self, challenger: Card, holder: Card) -> bool {
        let ct = self.trump.contains(challenger);
        let ht = self.trump.contains(holder);
        if ct != ht {
            return ct;
        }
        self.class_of(challenger).contains(holder) && self.power(challenger) > self.power(holder)
    }

    /// Index (0..3) of the winning card among three played in order.
    #[inline]
    pub fn winning_index(&self, cards: [Card; 3]) -> usize {
        let mut best = 0;
        for i in 1..3 {
            if self.beats(cards[i], cards[best]) {
                best = i;
            }
        }
        best
    }

    /// The cards of `card`'s class that are ranked directly below it, strongest first.
    pub fn lower_in_class(&self, card: Card) -> impl Iterator<Item = Card> + '_ {
        let p = self.power(card);
        let mut below: Vec<Card> = self
            .class_of(card)
            .iter()
            .filter(|&c| self.power(c) < p)
            .collect();
        below.sort_by_key(|&c| std::cmp::Reverse(self.power(c)));
        below.into_iter()
    }
}

/// The cards on the table in the current trick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrickState {
    pub leader: Seat,
    cards: [Card; 3],
    len: u8,
}

impl TrickState {
    pub fn new(leader: Seat) -> TrickState {
        TrickState {
            leader,
            cards: [Card::from_index(0); 3],
            len: 0,
        }
    }

    pub fn from_cards(leader: Seat, cards: &[Card]) -> TrickState {
        assert!(cards.len() <= 3, "a trick holds at most three cards");
        let mut t = TrickState::new(leader);
        for &c in cards {
            t.push(c);
        }
        t
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.len == 3
    }

    #[inline]
    pub fn lead(&self) -> Option<Card> {
        (self.len > 0).then_some(self.cards[0])
    }

    #[inline]
    pub fn cards(&self) -> &[Card] {
        &self.cards[..self.len as usize]
    }

    pub fn card_set(&self) -> CardSet {
        self.cards().iter().copied().collect()
    }

    /// Seat that plays next into this trick.
    #[inline]
    pub fn to_move(&self) -> Seat {
        Seat((self.leader.0 + self.len) % 3)
    }

    /// (seat, card) pairs in play order.
    pub fn plays(&self) -> impl Iterator<Item = (Seat, Card)> + '_ {
        self.cards()
            .iter()
            .enumerate()
            .map(move |(i, &c)| (Seat((self.leader.0 + i as u8) % 3), c))
    }

    /// Whether `seat` already contributed a card to this trick.
    pub fn has_played(&self, seat: Seat) -> bool {
        let offset = (seat.0 + 3 - self.leader.0) % 3;
        offset < self.len
    }

    #[inline]
    pub fn push(&mut self, card: Card) {
        assert!(self.len < 3, "trick already complete");
        self.cards[self.len as usize] = card;
        self.len += 1;
    }

    pub fn points(&self) -> u32 {
        self.cards().iter().map(|c| c.points() as u32).sum()
    }

    /// Seat currently holding the trick, if any card is down.
    pub fn current_winner(&self, rules: &Rules) -> Option<Seat> {
        let cards = self.cards();
        if cards.is_empty() {
            return None;
        }
        let mut best = 0;
        for (i, &c) in cards.iter().enumerate().skip(1) {
            if rules.beats(c, cards[best]) {
                best = i;
            }
        }
        Some(Seat((self.leader.0 + best as u8) % 3))
    }
}

impl Serialize for TrickState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            leader: Seat,
            cards: &'a [Card],
        }
        Repr {
            leader: self.leader,
            cards: self.cards(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrickState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<TrickState, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            leader: Seat,
            #[serde(default)]
            cards: Vec<Card>,
        }
        let r = Repr::deserialize(deserializer)?;
        if r.cards.len() > 3 || r.leader.0 > 2 {
            return Err(serde::de::Error::custom("trick: at most 3 cards, leader 0..2"));
        }
        Ok(TrickState::from_cards(r.leader, &r.cards))
    }
}

pub fn playable(hand: CardSet, trick: &TrickState, game: GameType) -> CardSet {
    Rules::new(game).playable(hand, trick.lead())
}

/// Winner of a complete trick. Panics if fewer than three cards are down.
pub fn trick_winner(trick: &TrickState, game: GameType) -> Seat {
    assert!(trick.is_complete(), "trick_winner needs three cards");
    let rules = Rules::new(game);
    let c = trick.cards();
    let i = rules.winning_index([c[0], c[1], c[2]]);
    Seat((trick.leader.0 + i as u8) % 3)
}

/// Checks `card` against a hand and trick; returns the legal set on failure.
pub fn check_play(rules: &Rules, seat: Seat, hand: CardSet, trick: &TrickState, card: Card) -> Result<(), PlayError> {
    if !hand.contains(card) {
        return Err(PlayError::NotInHand { seat, card });
    }
    let legal = rules.playable(hand, trick.lead());
    if !legal.contains(card) {
        return Err(PlayError::MustFollow { card, legal });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[default]
    Normal,
    Schneider,
    Schwarz,
}

impl Level {
    /// Declarer wins iff their points exceed this.
    pub fn limit(self) -> u8 {
        match self {
            Level::Normal => 60,
            Level::Schneider => 89,
            Level::Schwarz => 119,
        }
    }

    pub fn from_limit(limit: u8) -> Option<Level> {
        match limit {
            60 => Some(Level::Normal),
            89 => Some(Level::Schneider),
            119 => Some(Level::Schwarz),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Contract {
    pub game: GameType,
    #[serde(default)]
    pub level: Level,
    #[serde(default)]
    pub hand: bool,
    #[serde(default)]
    pub ouvert: bool,
}

impl Contract {
    pub fn new(game: GameType) -> Contract {
        Contract {
            game,
            level: Level::Normal,
            hand: false,
            ouvert: false,
        }
    }

    pub fn with_level(mut self, level: Level) -> Contract {
        self.level = level;
        self
    }

    /// Point threshold for trump games; `None` for null.
    pub fn limit(&self) -> Option<u8> {
        self.game.is_trump_game().then(|| self.level.limit())
    }

    pub fn null_value(&self) -> u32 {
        match (self.hand, self.ouvert) {
            (false, false) => 23,
            (true, false) => 35,
            (false, true) => 46,
            (true, true) => 59,
        }
    }
}

/// Matador count: length of the unbroken top-trump run held ("with") or missing ("without").
pub fn matadors(declarer_cards: CardSet, game: GameType) -> (bool, u32) {
    let order: Vec<Card> = match game {
        GameType::Null => return (false, 0),
        GameType::Grand => Suit::ALL.iter().rev().map(|&s| Card::new(s, Rank::Jack)).collect(),
        GameType::Suit(t) => Suit::ALL
            .iter()
            .rev()
            .map(|&s| Card::new(s, Rank::Jack))
            .chain(
                [Rank::Ace, Rank::Ten, Rank::King, Rank::Queen, Rank::Nine, Rank::Eight, Rank::Seven]
                    .iter()
                    .map(|&r| Card::new(t, r)),
            )
            .collect(),
    };
    let with = declarer_cards.contains(order[0]);
    let n = order.iter().take_while(|&&c| declarer_cards.contains(c) == with).count();
    (with, n as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub won: bool,
    #[serde(default)]
    pub schneider: bool,
    #[serde(default)]
    pub schwarz: bool,
}

/// Signed score of a completed game: `+V` when won, `-2V` when lost.
pub fn game_value(contract: &Contract, declarer_cards: CardSet, outcome: Outcome) -> Result<i64, RulesError> {
    if outcome.schwarz && !outcome.schneider {
        return Err(RulesError::SchwarzWithoutSchneider);
    }
    let v = unsigned_value(contract, declarer_cards, outcome) as i64;
    Ok(if outcome.won { v } else { -2 * v })
}

fn multiplier(contract: &Contract, declarer_cards: CardSet, outcome: Outcome) -> u32 {
    let (_, m) = matadors(declarer_cards, contract.game);
    let announced = match contract.level {
        Level::Normal => 0,
        Level::Schneider => 1,
        Level::Schwarz => 2,
    };
    m + 1
        + contract.hand as u32
        + outcome.schneider as u32
        + outcome.schwarz as u32
        + announced
        + contract.ouvert as u32
}

fn unsigned_value(contract: &Contract, declarer_cards: CardSet, outcome: Outcome) -> u32 {
    match contract.game {
        GameType::Null => contract.null_value(),
        g => g.base_value() * multiplier(contract, declarer_cards, outcome),
    }
}

/// Final accounting of a played-out game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Settlement {
    pub outcome: Outcome,
    pub declarer_points: u32,
    /// Game value before overbid adjustment.
    pub value: u32,
    pub overbid: bool,
    /// Signed score credited to the declarer.
    pub score: i64,
}

/// Settles a game from the final card counts. Schwarz requires a side to
/// take no trick; announced schwarz requires the opponents to take none.
pub fn settle(
    contract: &Contract,
    declarer_cards: CardSet,
    bid: u32,
    declarer_points: u32,
    declarer_tricks: u32,
    opponent_tricks: u32,
) -> Settlement {
    let outcome = match contract.game {
        GameType::Null => Outcome {
            won: declarer_tricks == 0,
            schneider: false,
            schwarz: false,
        },
        _ => {
            let schneider = declarer_points >= 90 || declarer_points <= 30;
            let schwarz = declarer_tricks == 0 || opponent_tricks == 0;
            let won = match contract.level {
                Level::Normal => declarer_points > 60,
                Level::Schneider => declarer_points >= 90,
                Level::Schwarz => opponent_tricks == 0,
            };
            Outcome { won, schneider, schwarz }
        }
    };
    let value = unsigned_value(contract, declarer_cards, outcome);
    let overbid = value < bid;
    let score = if overbid {
        let lost = match contract.game {
            GameType::Null => [23, 35, 46, 59].into_iter().find(|&v| v >= bid).unwrap_or(bid),
            g => {
                let base = g.base_value();
                bid.div_ceil(base) * base
            }
        };
        -2 * lost as i64
    } else if outcome.won {
        value as i64
    } else {
        -2 * value as i64
    };
    Settlement {
        outcome: Outcome {
            won: outcome.won && !overbid,
            ..outcome
        },
        declarer_points,
        value,
        overbid,
        score,
    }
}

/// The bid ladder up to the highest grand value.
pub fn bid_ladder() -> Vec<u32> {
    let mut v: Vec<u32> = Vec::new();
    for base in [9u32, 10, 11, 12, 24] {
        for m in 2..=18 {
            v.push(base * m);
        }
    }
    v.extend([23, 35, 46, 59]);
    v.retain(|&x| x >= 18);
    v.sort_unstable();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cards::cards;

    fn c(s: &str) -> Card {
        s.parse().unwrap()
    }

    #[test]
    fn trump_sets() {
        assert_eq!(trump_set(GameType::Grand), cards("DJ HJ SJ CJ"));
        let hearts = trump_set(GameType::Suit(Suit::Hearts));
        assert_eq!(hearts.len(), 11);
        assert_eq!(hearts, cards("CJ SJ HJ DJ HA HT HK HQ H9 H8 H7"));
        assert!(trump_set(GameType::Null).is_empty());
    }

    #[test]
    fn playable_cases() {
        let hearts = GameType::Suit(Suit::Hearts);
        let trick = TrickState::from_cards(Seat(0), &[c("DA")]);
        assert_eq!(playable(cards("HJ CA"), &trick, hearts), cards("HJ CA"));
        assert_eq!(playable(cards("DT CA"), &trick, hearts), cards("DT"));
        assert_eq!(playable(cards("DT CA"), &TrickState::new(Seat(1)), hearts), cards("DT CA"));
        // jacks are trump, not diamonds
        assert_eq!(playable(cards("DJ CA"), &trick, hearts), cards("DJ CA"));
        // null: jack follows its suit
        assert_eq!(playable(cards("DJ CA"), &trick, GameType::Null), cards("DJ"));
        // trump lead must be followed by jacks too
        let t = TrickState::from_cards(Seat(0), &[c("H7")]);
        assert_eq!(playable(cards("CJ HA SA"), &t, hearts), cards("CJ HA"));
    }

    #[test]
    fn winners() {
        let hearts = GameType::Suit(Suit::Hearts);
        let t = TrickState::from_cards(Seat(2), &[c("DA"), c("HA"), c("D7")]);
        assert_eq!(trick_winner(&t, hearts), Seat(0));
        let t = TrickState::from_cards(Seat(1), &[c("SJ"), c("SQ"), c("S7")]);
        assert_eq!(trick_winner(&t, GameType::Null), Seat(2));
        let t = TrickState::from_cards(Seat(0), &[c("S7"), c("S8"), c("S9")]);
        assert_eq!(trick_winner(&t, GameType::Grand), Seat(2));
        // jack order
        let t = TrickState::from_cards(Seat(0), &[c("DJ"), c("CJ"), c("SJ")]);
        assert_eq!(trick_winner(&t, GameType::Grand), Seat(1));
        // off-suit non-trump never wins
        let t = TrickState::from_cards(Seat(0), &[c("S7"), c("CA"), c("DA")]);
        assert_eq!(trick_winner(&t, GameType::Suit(Suit::Hearts)), Seat(0));
        // ten ranks above king in trump games, below jack in null
        let t = TrickState::from_cards(Seat(0), &[c("SK"), c("ST"), c("S9")]);
        assert_eq!(trick_winner(&t, GameType::Grand), Seat(1));
        assert_eq!(trick_winner(&t, GameType::Null), Seat(0));
    }

    #[test]
    fn valuation() {
        let hearts = Contract::new(GameType::Suit(Suit::Hearts));
        // with 2: CJ SJ, missing HJ
        let hand = cards("CJ SJ HA HT HK H9 H8 SA ST S7 D7 D8");
        assert_eq!(matadors(hand, hearts.game), (true, 2));
        let won = Outcome { won: true, ..Outcome::default() };
        assert_eq!(game_value(&hearts, hand, won).unwrap(), 30);

        let null = Contract::new(GameType::Null);
        assert_eq!(game_value(&null, hand, won).unwrap(), 23);
        assert_eq!(game_value(&null, hand, Outcome::default()).unwrap(), -46);

        let grand = Contract::new(GameType::Grand);
        let four = cards("CJ SJ HJ DJ CA CT SA ST HA HT D7 D8");
        let schneider = Outcome { won: true, schneider: true, schwarz: false };
        assert_eq!(game_value(&grand, four, schneider).unwrap(), 144);

        // without 3 in spades
        let without = cards("DJ SA ST SK S7 HA HT H7 D7 D8 C7 C8");
        assert_eq!(matadors(without, GameType::Suit(Suit::Spades)), (false, 3));

        let bad = Outcome { won: true, schneider: false, schwarz: true };
        assert_eq!(game_value(&grand, four, bad), Err(RulesError::SchwarzWithoutSchneider));
    }

    #[test]
    fn settlement_and_overbid() {
        let hearts = Contract::new(GameType::Suit(Suit::Hearts));
        let hand = cards("CJ SJ HA HT HK H9 H8 SA ST S7 D7 D8");
        let s = settle(&hearts, hand, 18, 61, 5, 5);
        assert!(s.outcome.won && s.score == 30);
        let s = settle(&hearts, hand, 18, 60, 5, 5);
        assert!(!s.outcome.won && s.score == -60);
        let s = settle(&hearts, hand, 36, 70, 5, 5);
        assert!(s.overbid && !s.outcome.won && s.score == -80);
        let s = settle(&hearts, hand, 18, 95, 9, 1);
        assert_eq!(s.score, 40);
    }

    #[test]
    fn ladder_starts_at_18() {
        let l = bid_ladder();
        assert_eq!(&l[..6], &[18, 20, 22, 23, 24, 27]);
        assert_eq!(*l.last().unwrap(), 24 * 18);
    }
}
