//! Cards and 32-bit card sets.
//!
//! Bit layout is suit-major: `index = suit * 8 + rank`, with suits ordered
//! Diamonds, Hearts, Spades, Clubs and ranks ordered 7, 8, 9, Q, K, T, A, J.
//! Every suit is one contiguous byte and the four jacks sit at bits 7, 15,
//! 23 and 31.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suit {
    Diamonds = 0,
    Hearts = 1,
    Spades = 2,
    Clubs = 3,
}

impl Suit {
    pub const ALL: [Suit; 4] = [Suit::Diamonds, Suit::Hearts, Suit::Spades, Suit::Clubs];

    pub fn from_index(i: u8) -> Suit {
        Suit::ALL[(i & 3) as usize]
    }

    pub fn letter(self) -> char {
        match self {
            Suit::Diamonds => 'D',
            Suit::Hearts => 'H',
            Suit::Spades => 'S',
            Suit::Clubs => 'C',
        }
    }

    pub fn from_letter(c: char) -> Option<Suit> {
        match c.to_ascii_uppercase() {
            'D' => Some(Suit::Diamonds),
            'H' => Some(Suit::Hearts),
            'S' => Some(Suit::Spades),
            'C' => Some(Suit::Clubs),
            _ => None,
        }
    }

    /// All eight cards of the suit, jack included.
    pub const fn mask(self) -> CardSet {
        CardSet(0xff << (self as u32 * 8))
    }
}

impl fmt::Display for Suit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Seven = 0,
    Eight = 1,
    Nine = 2,
    Queen = 3,
    King = 4,
    Ten = 5,
    Ace = 6,
    Jack = 7,
}

impl Rank {
    pub const ALL: [Rank; 8] = [
        Rank::Seven,
        Rank::Eight,
        Rank::Nine,
        Rank::Queen,
        Rank::King,
        Rank::Ten,
        Rank::Ace,
        Rank::Jack,
    ];

    pub fn from_index(i: u8) -> Rank {
        Rank::ALL[(i & 7) as usize]
    }

    pub fn letter(self) -> char {
        match self {
            Rank::Seven => '7',
            Rank::Eight => '8',
            Rank::Nine => '9',
            Rank::Queen => 'Q',
            Rank::King => 'K',
            Rank::Ten => 'T',
            Rank::Ace => 'A',
            Rank::Jack => 'J',
        }
    }

    pub fn from_letter(c: char) -> Option<Rank> {
        match c.to_ascii_uppercase() {
            '7' => Some(Rank::Seven),
            '8' => Some(Rank::Eight),
            '9' => Some(Rank::Nine),
            'Q' => Some(Rank::Queen),
            'K' => Some(Rank::King),
            'T' => Some(Rank::Ten),
            'A' => Some(Rank::Ace),
            'J' => Some(Rank::Jack),
            _ => None,
        }
    }

    pub const fn points(self) -> u8 {
        match self {
            Rank::Seven | Rank::Eight | Rank::Nine => 0,
            Rank::Jack => 2,
            Rank::Queen => 3,
            Rank::King => 4,
            Rank::Ten => 10,
            Rank::Ace => 11,
        }
    }
}

/// A single card, stored as its bit index 0..32.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card(u8);

const POINTS: [u8; 32] = {
    let mut t = [0u8; 32];
    let mut i = 0;
    while i < 32 {
        t[i] = Rank::ALL[i & 7].points();
        i += 1;
    }
    t
};

impl Card {
    pub const fn new(suit: Suit, rank: Rank) -> Card {
        Card(suit as u8 * 8 + rank as u8)
    }

    /// Panics if `index >= 32`.
    pub fn from_index(index: u8) -> Card {
        assert!(index < 32, "card index {index} out of range");
        Card(index)
    }

    #[inline]
    pub const fn index(self) -> u8 {
        self.0
    }

    #[inline]
    pub const fn bit(self) -> u32 {
        1 << self.0
    }

    pub fn suit(self) -> Suit {
        Suit::from_index(self.0 >> 3)
    }

    pub fn rank(self) -> Rank {
        Rank::from_index(self.0 & 7)
    }

    #[inline]
    pub const fn points(self) -> u8 {
        POINTS[self.0 as usize]
    }

    pub fn is_jack(self) -> bool {
        self.0 & 7 == 7
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.suit().letter(), self.rank().letter())
    }
}

impl fmt::Debug for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Card {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Card, ParseError> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => {
                let suit = Suit::from_letter(a).ok_or_else(|| ParseError::Card(s.to_string()))?;
                let rank = Rank::from_letter(b).ok_or_else(|| ParseError::Card(s.to_string()))?;
                Ok(Card::new(suit, rank))
            }
            _ => Err(ParseError::Card(s.to_string())),
        }
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Card, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of cards as a 32-bit vector.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CardSet(pub u32);

impl CardSet {
    pub const EMPTY: CardSet = CardSet(0);
    pub const DECK: CardSet = CardSet(u32::MAX);
    pub const JACKS: CardSet = CardSet(0x8080_8080);
    pub const ACES: CardSet = CardSet(0x4040_4040);

    #[inline]
    pub const fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn contains(self, card: Card) -> bool {
        self.0 & card.bit() != 0
    }

    #[inline]
    pub fn insert(&mut self, card: Card) {
        self.0 |= card.bit();
    }

    #[inline]
    pub fn remove(&mut self, card: Card) {
        self.0 &= !card.bit();
    }

    #[inline]
    pub const fn with(self, card: Card) -> CardSet {
        CardSet(self.0 | card.bit())
    }

    #[inline]
    pub const fn without(self, card: Card) -> CardSet {
        CardSet(self.0 & !card.bit())
    }

    #[inline]
    pub const fn intersects(self, other: CardSet) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub const fn is_subset(self, other: CardSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Lowest card by bit index.
    #[inline]
    pub fn first(self) -> Option<Card> {
        if self.0 == 0 {
            None
        } else {
            Some(Card(self.0.trailing_zeros() as u8))
        }
    }

    /// Highest card by bit index.
    #[inline]
    pub fn last(self) -> Option<Card> {
        if self.0 == 0 {
            None
        } else {
            Some(Card(31 - self.0.leading_zeros() as u8))
        }
    }

    pub fn points(self) -> u32 {
        self.iter().map(|c| c.points() as u32).sum()
    }

    pub fn iter(self) -> CardIter {
        CardIter(self.0)
    }

    pub fn to_vec(self) -> Vec<Card> {
        self.iter().collect()
    }

    /// Space separated two-character cards, ascending bit index.
    pub fn to_text(self) -> String {
        self.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
    }

    /// Parses whitespace or comma separated cards. Duplicates are rejected.
    pub fn parse_list(s: &str) -> Result<CardSet, ParseError> {
        let mut set = CardSet::EMPTY;
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let card: Card = tok.parse()?;
            if set.contains(card) {
                return Err(ParseError::DuplicateCard(card));
            }
            set.insert(card);
        }
        Ok(set)
    }
}

impl std::ops::BitOr for CardSet {
    type Output = CardSet;
    #[inline]
    fn bitor(self, rhs: CardSet) -> CardSet {
        CardSet(self.0 | rhs.0)
    }
}

impl std::ops::BitOrAssign for CardSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: CardSet) {
        self.0 |= rhs.0;
    }
}

impl std::ops::BitAnd for CardSet {
    type Output = CardSet;
    #[inline]
    fn bitand(self, rhs: CardSet) -> CardSet {
        CardSet(self.0 & rhs.0)
    }
}

impl std::ops::BitAndAssign for CardSet {
    #[inline]
    fn bitand_assign(&mut self, rhs: CardSet) {
        self.0 &= rhs.0;
    }
}

impl std::ops::Not for CardSet {
    type Output = CardSet;
    #[inline]
    fn not(self) -> CardSet {
        CardSet(!self.0)
    }
}

impl std::ops::Sub for CardSet {
    type Output = CardSet;
    #[inline]
    fn sub(self, rhs: CardSet) -> CardSet {
        CardSet(self.0 & !rhs.0)
    }
}

impl std::ops::SubAssign for CardSet {
    #[inline]
    fn sub_assign(&mut self, rhs: CardSet) {
        self.0 &= !rhs.0;
    }
}

impl From<Card> for CardSet {
    fn from(card: Card) -> CardSet {
        CardSet(card.bit())
    }
}

impl FromIterator<Card> for CardSet {
    fn from_iter<I: IntoIterator<Item = Card>>(iter: I) -> CardSet {
        let mut set = CardSet::EMPTY;
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl IntoIterator for CardSet {
    type Item = Card;
    type IntoIter = CardIter;
    fn into_iter(self) -> CardIter {
        self.iter()
    }
}

pub struct CardIter(u32);

impl Iterator for CardIter {
    type Item = Card;

    #[inline]
    fn next(&mut self) -> Option<Card> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Card(i as u8))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for CardIter {}

impl DoubleEndedIterator for CardIter {
    fn next_back(&mut self) -> Option<Card> {
        if self.0 == 0 {
            return None;
        }
        let i = 31 - self.0.leading_zeros();
        self.0 &= !(1 << i);
        Some(Card(i as u8))
    }
}

impl fmt::Display for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_text())
    }
}

impl fmt::Debug for CardSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// JSON form: array of card strings in ascending bit order.
impl Serialize for CardSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for CardSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<CardSet, D::Error> {
        let cards = Vec::<Card>::deserialize(deserializer)?;
        let mut set = CardSet::EMPTY;
        for c in cards {
            if set.contains(c) {
                return Err(serde::de::Error::custom(format!("duplicate card {c}")));
            }
            set.insert(c);
        }
        Ok(set)
    }
}

/// Builds a set from a literal list, panicking on malformed input. Test and fixture helper.
pub fn cards(s: &str) -> CardSet {
    CardSet::parse_list(s).unwrap_or_else(|e| panic!("bad card list {s:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bit_layout() {
        assert_eq!(Card::new(Suit::Diamonds, Rank::Seven).index(), 0);
        assert_eq!(Card::new(Suit::Diamonds, Rank::Jack).index(), 7);
        assert_eq!(Card::new(Suit::Hearts, Rank::Ace).index(), 14);
        assert_eq!(Card::new(Suit::Clubs, Rank::Jack).index(), 31);
        for i in 0..32u8 {
            let c = Card::from_index(i);
            assert_eq!(Card::new(c.suit(), c.rank()), c);
        }
        assert_eq!(CardSet::JACKS.len(), 4);
        assert!(CardSet::JACKS.iter().all(Card::is_jack));
    }

    #[test]
    fn points_total_120() {
        assert_eq!("H7".parse::<Card>().unwrap().points(), 0);
        assert_eq!("DA".parse::<Card>().unwrap().points(), 11);
        assert_eq!(CardSet::DECK.points(), 120);
        assert_eq!(Suit::Spades.mask().points(), 30);
    }

    #[test]
    fn text_forms() {
        let c: Card = "HA".parse().unwrap();
        assert_eq!(c.to_string(), "HA");
        assert!("XA".parse::<Card>().is_err());
        assert!("HAA".parse::<Card>().is_err());
        assert!(matches!(CardSet::parse_list("HA HA"), Err(ParseError::DuplicateCard(_))));
        let set = cards("SA DT CJ");
        assert_eq!(serde_json::to_string(&set).unwrap(), r#"["DT","SA","CJ"]"#);
    }

    proptest! {
        #[test]
        fn json_and_text_roundtrip(bits in any::<u32>()) {
            let set = CardSet(bits);
            let json = serde_json::to_string(&set).unwrap();
            prop_assert_eq!(serde_json::from_str::<CardSet>(&json).unwrap(), set);
            prop_assert_eq!(CardSet::parse_list(&set.to_text()).unwrap(), set);
            prop_assert_eq!(set.iter().count() as u32, set.len());
            prop_assert_eq!(set.iter().rev().collect::<CardSet>(), set);
        }
    }
}
