//! Seat-scoped state, rebuilt only from the events a seat has seen.

use serde::{Deserialize, Serialize};
use skat_core::game::{Event, Phase};
use skat_core::rules::Settlement;
use skat_core::{Card, CardSet, Contract, Seat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablePlay {
    pub seat: Seat,
    pub card: Card,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub seat: Seat,
    pub phase: Phase,
    pub forehand: Seat,
    pub hand: CardSet,
    pub bid: u32,
    pub high_bidder: Option<Seat>,
    pub passed: [bool; 3],
    pub declarer: Option<Seat>,
    pub contract: Option<Contract>,
    /// The skat as seen by this seat: picked up by this seat, or revealed at the end.
    pub skat: CardSet,
    /// This seat's own discard, or every discard at the end.
    pub discard: CardSet,
    /// Declarer's cards still in hand in ouvert games.
    pub open_hand: CardSet,
    pub trick: Vec<TablePlay>,
    pub last_trick: Vec<TablePlay>,
    pub played: CardSet,
    pub declarer_trick_points: u32,
    pub opponent_trick_points: u32,
    pub declarer_tricks: u32,
    pub opponent_tricks: u32,
    pub to_act: Option<Seat>,
    pub settlement: Option<Settlement>,
    /// Number of events folded in.
    pub events: usize,
}

impl Snapshot {
    fn empty(seat: Seat) -> Snapshot {
        Snapshot {
            seat,
            phase: Phase::Bidding,
            forehand: Seat(0),
            hand: CardSet::EMPTY,
            bid: 0,
            high_bidder: None,
            passed: [false; 3],
            declarer: None,
            contract: None,
            skat: CardSet::EMPTY,
            discard: CardSet::EMPTY,
            open_hand: CardSet::EMPTY,
            trick: Vec::new(),
            last_trick: Vec::new(),
            played: CardSet::EMPTY,
            declarer_trick_points: 0,
            opponent_trick_points: 0,
            declarer_tricks: 0,
            opponent_tricks: 0,
            to_act: None,
            settlement: None,
            events: 0,
        }
    }

    /// Folds the events `seat` received. Events meant for other seats must
    /// already be redacted with `Event::visible_to`.
    pub fn from_events<'a>(seat: Seat, events: impl IntoIterator<Item = &'a Event>) -> Snapshot {
        let mut s = Snapshot::empty(seat);
        for e in events {
            s.apply(e);
        }
        s
    }

    fn next_active(&self, after: Seat) -> Option<Seat> {
        let mut n = after.next();
        for _ in 0..3 {
            if !self.passed[n.index()] {
                return Some(n);
            }
            n = n.next();
        }
        None
    }

    pub fn apply(&mut self, e: &Event) {
        self.events += 1;
        let me = self.seat;
        match *e {
            Event::Dealt { seat, hand, forehand } => {
                if seat == me {
                    self.hand = hand;
                }
                self.forehand = forehand;
                self.to_act = Some(forehand);
            }
            Event::Bid { seat, value } => {
                self.bid = value;
                self.high_bidder = Some(seat);
                self.to_act = self.next_active(seat);
            }
            Event::Pass { seat } => {
                self.passed[seat.index()] = true;
                self.to_act = self.next_active(seat);
            }
            Event::AuctionWon { seat, bid } => {
                self.declarer = Some(seat);
                self.bid = bid;
                self.phase = Phase::Skat;
                self.to_act = Some(seat);
            }
            Event::PassedIn => {
                self.phase = Phase::Finished;
                self.to_act = None;
            }
            Event::PickedUp { seat, skat } => {
                if seat == me {
                    self.hand |= skat;
                    self.skat = skat;
                }
                self.phase = Phase::Declaring;
            }
            Event::Declared {
                seat,
                contract,
                discard,
                open_hand,
            } => {
                if seat == me {
                    self.hand -= discard;
                    self.discard = discard;
                }
                self.contract = Some(contract);
                self.open_hand = if seat == me { CardSet::EMPTY } else { open_hand };
                self.phase = Phase::Trick;
                self.to_act = Some(self.forehand);
            }
            Event::Played { seat, card } => {
                if seat == me {
                    self.hand.remove(card);
                }
                if Some(seat) == self.declarer {
                    self.open_hand.remove(card);
                }
                self.played.insert(card);
                self.trick.push(TablePlay { seat, card });
                self.to_act = Some(seat.next());
            }
            Event::TrickTaken { seat, points } => {
                if Some(seat) == self.declarer {
                    self.declarer_trick_points += points;
                    self.declarer_tricks += 1;
                } else {
                    self.opponent_trick_points += points;
                    self.opponent_tricks += 1;
                }
                self.last_trick = std::mem::take(&mut self.trick);
                self.to_act = Some(seat);
            }
            Event::Finished {
                settlement,
                skat,
                discard,
            } => {
                self.phase = Phase::Finished;
                self.settlement = settlement;
                self.skat = skat;
                self.discard = discard;
                self.to_act = None;
            }
        }
    }
}
