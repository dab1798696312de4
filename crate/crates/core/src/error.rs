use thiserror::Error;

use crate::cards::{Card, CardSet};
use crate::rules::Seat;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("malformed card {0:?}, expected suit D/H/S/C followed by rank 7/8/9/T/J/Q/K/A")]
    Card(String),
    #[error("card {0} listed twice")]
    DuplicateCard(Card),
    #[error("malformed game type {0:?}")]
    GameType(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RulesError {
    #[error("schwarz outcome without schneider")]
    SchwarzWithoutSchneider,
    #[error("null contracts carry no point limit")]
    NullHasNoLimit,
    #[error("declarer holds {0} cards, expected 12 (hand plus skat)")]
    DeclarerCards(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnowledgeError {
    #[error("hand has {got} cards, expected {expected}")]
    HandSize { expected: u32, got: u32 },
    #[error("skat has {0} cards, expected 2")]
    SkatSize(u32),
    #[error("seat {actor} cannot hold {card}: {reason}")]
    InconsistentObservation {
        actor: Seat,
        card: Card,
        reason: &'static str,
    },
    #[error("no card placement fits the remaining hand sizes")]
    CapacityDeficit,
    #[error("knowledge sets overlap on {0}")]
    Overlap(CardSet),
    #[error("knowledge sets do not cover the deck, missing {0}")]
    Uncovered(CardSet),
    #[error("no consistent world")]
    NoWorlds,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlayError {
    #[error("seat {seat} does not hold {card}")]
    NotInHand { seat: Seat, card: Card },
    #[error("{card} does not follow, must follow with one of {legal}")]
    MustFollow { card: Card, legal: CardSet },
    #[error("game is over")]
    GameOver,
}

/// Search was stopped by its deadline or node budget before a result was proven.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("search aborted by budget")]
pub struct Aborted;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error("query needs a {expected} view")]
    WrongRole { expected: &'static str },
    #[error("paranoia search covers trump games only")]
    NotTrumpGame,
    #[error("seat {0} is not to move")]
    NotToMove(Seat),
    #[error("{0} is not playable here")]
    NotPlayable(Card),
    #[error(transparent)]
    Aborted(#[from] Aborted),
}
