//! Game logs: one JSON object per line.

use serde::{Deserialize, Serialize};
use skat_core::game::{Action, GameError, GameState, Phase};
use skat_core::rules::{bid_ladder, Settlement};
use skat_core::{Card, CardSet, Contract, Seat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordResult {
    /// Declarer card points including the skat.
    pub declarer_points: u32,
    pub won: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    dealer: Seat,
    hands: [Vec<Card>; 3],
    skat: Vec<Card>,
    declarer: Seat,
    bid: u32,
    contract: Contract,
    #[serde(default)]
    discard: Vec<Card>,
    moves: Vec<Card>,
    result: RecordResult,
}

/// A validated game: deal, auction result, contract, skat exchange, the
/// card sequence and the recorded result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub id: Option<String>,
    pub dealer: Seat,
    pub hands: [CardSet; 3],
    pub skat: CardSet,
    pub declarer: Seat,
    pub bid: u32,
    pub contract: Contract,
    /// The two cards laid away; empty in hand games.
    pub discard: CardSet,
    pub moves: Vec<Card>,
    pub result: RecordResult,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DealError {
    #[error("card {0} dealt twice")]
    Duplicate(Card),
    #[error("seat {seat} holds {got} cards")]
    HandSize { seat: Seat, got: usize },
    #[error("skat holds {0} cards")]
    SkatSize(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("deal: {0}")]
    Deal(#[from] DealError),
    #[error("bid {0} is not a game value")]
    Bid(u32),
    #[error("discard must be two cards of the declarer, or empty in hand games")]
    Discard,
    #[error("contract: {0}")]
    Contract(GameError),
    #[error("ply {ply}: illegal card {card}: {error}")]
    IllegalMove { ply: usize, card: Card, error: GameError },
    #[error("moves end after {0} cards before the game is decided")]
    Incomplete(usize),
    #[error("recorded result {recorded:?} differs from the replayed {computed:?}")]
    Result { recorded: RecordResult, computed: RecordResult },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {error}")]
pub struct LogError {
    pub line: usize,
    pub error: RecordError,
}

fn to_set(cards: &[Card]) -> Result<CardSet, DealError> {
    let mut set = CardSet::EMPTY;
    for &c in cards {
        if set.contains(c) {
            return Err(DealError::Duplicate(c));
        }
        set.insert(c);
    }
    Ok(set)
}

impl GameRecord {
    fn from_wire(w: Wire) -> Result<GameRecord, RecordError> {
        let mut seen: Vec<Card> = Vec::with_capacity(32);
        for h in &w.hands {
            seen.extend(h);
        }
        seen.extend(&w.skat);
        to_set(&seen)?;
        for (i, h) in w.hands.iter().enumerate() {
            if h.len() != 10 {
                return Err(DealError::HandSize {
                    seat: Seat(i as u8),
                    got: h.len(),
                }
                .into());
            }
        }
        if w.skat.len() != 2 {
            return Err(DealError::SkatSize(w.skat.len()).into());
        }
        let discard = to_set(&w.discard).map_err(|_| RecordError::Discard)?;
        let r = GameRecord {
            id: w.id,
            dealer: w.dealer,
            hands: [to_set(&w.hands[0])?, to_set(&w.hands[1])?, to_set(&w.hands[2])?],
            skat: to_set(&w.skat)?,
            declarer: w.declarer,
            bid: w.bid,
            contract: w.contract,
            discard,
            moves: w.moves,
            result: w.result,
        };
        r.validate()?;
        Ok(r)
    }

    fn to_wire(&self) -> Wire {
        Wire {
            id: self.id.clone(),
            dealer: self.dealer,
            hands: self.hands.map(|h| h.iter().collect()),
            skat: self.skat.iter().collect(),
            declarer: self.declarer,
            bid: self.bid,
            contract: self.contract,
            discard: self.discard.iter().collect(),
            moves: self.moves.clone(),
            result: self.result,
        }
    }

    pub fn picked_up(&self) -> bool {
        !self.contract.hand
    }

    /// The game after an auction won by the recorded declarer at the
    /// recorded bid, the others passing.
    pub fn auction(&self) -> Result<GameState, RecordError> {
        if !bid_ladder().contains(&self.bid) {
            return Err(RecordError::Bid(self.bid));
        }
        let mut g = GameState::new(self.dealer, self.hands, self.skat);
        while g.phase == Phase::Bidding {
            let s = g.to_act().expect("auction running");
            let a = if s == self.declarer {
                Action::Bid { value: self.bid }
            } else {
                Action::Pass
            };
            g.apply(s, a).map_err(RecordError::Contract)?;
        }
        Ok(g)
    }

    /// The game after the auction and skat exchange, ready for the first card.
    pub fn setup(&self) -> Result<GameState, RecordError> {
        let mut g = self.auction()?;
        let discard = if self.contract.hand {
            if !self.discard.is_empty() {
                return Err(RecordError::Discard);
            }
            None
        } else {
            g.apply(self.declarer, Action::PickUp).map_err(RecordError::Contract)?;
            let d: Vec<Card> = self.discard.iter().collect();
            if d.len() != 2 {
                return Err(RecordError::Discard);
            }
            Some([d[0], d[1]])
        };
        let declare = Action::Declare {
            game: self.contract.game,
            discard,
            level: self.contract.level,
            ouvert: self.contract.ouvert,
        };
        g.apply(self.declarer, declare).map_err(|e| match e {
            GameError::BadDiscard => RecordError::Discard,
            e => RecordError::Contract(e),
        })?;
        if g.contract != Some(self.contract) {
            // ouvert trump games are played as announced schwarz
            return Err(RecordError::Contract(GameError::BadAnnouncement));
        }
        Ok(g)
    }

    /// Replays every recorded card and returns the finished game.
    pub fn replay(&self) -> Result<GameState, RecordError> {
        let mut g = self.setup()?;
        for (ply, &card) in self.moves.iter().enumerate() {
            let Some(seat) = g.to_act() else {
                return Err(RecordError::IllegalMove {
                    ply,
                    card,
                    error: GameError::WrongPhase(Phase::Finished),
                });
            };
            g.apply(seat, Action::Play { card })
                .map_err(|error| RecordError::IllegalMove { ply, card, error })?;
        }
        if g.phase != Phase::Finished {
            return Err(RecordError::Incomplete(self.moves.len()));
        }
        Ok(g)
    }

    pub fn settlement(&self) -> Result<Settlement, RecordError> {
        Ok(self.replay()?.settlement.expect("finished"))
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        let s = self.settlement()?;
        let computed = RecordResult {
            declarer_points: s.declarer_points,
            won: s.outcome.won,
        };
        if computed != self.result {
            return Err(RecordError::Result {
                recorded: self.result,
                computed,
            });
        }
        Ok(())
    }

    /// Record of a finished game; `None` if the game was passed in or is
    /// still running.
    pub fn from_game(g: &GameState, id: Option<String>) -> Option<GameRecord> {
        let s = g.settlement?;
        Some(GameRecord {
            id,
            dealer: g.dealer,
            hands: g.deal,
            skat: g.dealt_skat,
            declarer: g.declarer?,
            bid: g.bid,
            contract: g.contract?,
            discard: if g.picked_up { g.skat } else { CardSet::EMPTY },
            moves: g.moves.clone(),
            result: RecordResult {
                declarer_points: s.declarer_points,
                won: s.outcome.won,
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("plain data")
    }
}

impl Serialize for GameRecord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_wire().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GameRecord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<GameRecord, D::Error> {
        let w = Wire::deserialize(deserializer)?;
        GameRecord::from_wire(w).map_err(serde::de::Error::custom)
    }
}

pub fn parse_record(line: &str) -> Result<GameRecord, RecordError> {
    let w: Wire = serde_json::from_str(line).map_err(|e| RecordError::Schema(e.to_string()))?;
    GameRecord::from_wire(w)
}

/// Parses a log, skipping blank lines. Line numbers start at 1.
pub fn parse_log(text: &str) -> Result<Vec<GameRecord>, LogError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_record(l).map_err(|error| LogError { line: i + 1, error }))
        .collect()
}

pub fn emit_log(records: &[GameRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.to_json());
        out.push('\n');
    }
    out
}
