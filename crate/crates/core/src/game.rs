//! Authoritative state of one deal: auction, skat exchange, declaration and
//! trick play, with the event stream each seat is allowed to see.
//!
//! The auction is a plain ascending auction: seats act in turn from
//! forehand, each either raising to a higher value of the bid ladder or
//! passing for good. It ends when one active seat remains after a bid, or
//! when everybody passed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::{Card, CardSet};
use crate::rules::{bid_ladder, settle, Contract, GameType, Level, Rules, Seat, Settlement, TrickState};
use crate::solver::SearchPosition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Bidding,
    /// Declarer decides between picking up the skat and a hand game.
    Skat,
    /// Declarer holds twelve cards and must discard two and declare.
    Declaring,
    Trick,
    Finished,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Bid { value: u32 },
    Pass,
    PickUp,
    /// `discard` is required after a pick-up and absent for hand games.
    Declare {
        game: GameType,
        #[serde(default)]
        discard: Option<[Card; 2]>,
        #[serde(default)]
        level: Level,
        #[serde(default)]
        ouvert: bool,
    },
    Play { card: Card },
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", content = "detail", rename_all = "snake_case")]
pub enum GameError {
    #[error("seat {actual} acted, seat {expected} is to act")]
    OutOfTurn { expected: Seat, actual: Seat },
    #[error("action not allowed in phase {0:?}")]
    WrongPhase(Phase),
    #[error("bid {value} must be a ladder value above {current}")]
    BadBid { value: u32, current: u32 },
    #[error("discard must be two distinct cards from the declarer's twelve")]
    BadDiscard,
    #[error("announcements need a hand game")]
    BadAnnouncement,
    #[error("{card} does not follow, must follow with one of {legal}")]
    MustFollow { card: Card, legal: CardSet },
    #[error("seat does not hold {0}")]
    NotInHand(Card),
}

/// Everything that happens in a deal, in order. `visible_to` redacts what a
/// seat may not see.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Dealt {
        seat: Seat,
        /// Empty in other seats' copies.
        hand: CardSet,
        forehand: Seat,
    },
    Bid {
        seat: Seat,
        value: u32,
    },
    Pass {
        seat: Seat,
    },
    AuctionWon {
        seat: Seat,
        bid: u32,
    },
    PassedIn,
    /// `skat` is empty in other seats' copies.
    PickedUp {
        seat: Seat,
        skat: CardSet,
    },
    Declared {
        seat: Seat,
        contract: Contract,
        /// Empty in other seats' copies.
        discard: CardSet,
        /// Declarer's remaining hand, shown to everybody in ouvert games.
        open_hand: CardSet,
    },
    Played {
        seat: Seat,
        card: Card,
    },
    TrickTaken {
        seat: Seat,
        points: u32,
    },
    Finished {
        /// `None` when everybody passed.
        settlement: Option<Settlement>,
        /// Skat as dealt and the cards that counted for the declarer.
        skat: CardSet,
        discard: CardSet,
    },
}

impl Event {
    /// The copy of this event that `seat` receives, if any.
    pub fn visible_to(&self, seat: Seat) -> Option<Event> {
        match self {
            Event::Dealt { seat: s, forehand, .. } if *s != seat => Some(Event::Dealt {
                seat: *s,
                hand: CardSet::EMPTY,
                forehand: *forehand,
            }),
            Event::PickedUp { seat: s, .. } if *s != seat => Some(Event::PickedUp {
                seat: *s,
                skat: CardSet::EMPTY,
            }),
            Event::Declared {
                seat: s,
                contract,
                open_hand,
                ..
            } if *s != seat => Some(Event::Declared {
                seat: *s,
                contract: *contract,
                discard: CardSet::EMPTY,
                open_hand: *open_hand,
            }),
            e => Some(e.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameState {
    pub dealer: Seat,
    /// Hands and skat as dealt.
    pub deal: [CardSet; 3],
    pub dealt_skat: CardSet,
    pub hands: [CardSet; 3],
    pub phase: Phase,
    /// Current highest bid and its bidder.
    pub bid: u32,
    pub high_bidder: Option<Seat>,
    passed: [bool; 3],
    to_act: Seat,
    pub declarer: Option<Seat>,
    pub picked_up: bool,
    pub contract: Option<Contract>,
    /// Cards counting for the declarer: the discard, or the skat in hand games.
    pub skat: CardSet,
    pub trick: TrickState,
    pub moves: Vec<Card>,
    pub declarer_points: u32,
    pub declarer_tricks: u32,
    pub opponent_tricks: u32,
    pub settlement: Option<Settlement>,
    pub events: Vec<Event>,
}

impl GameState {
    pub fn new(dealer: Seat, hands: [CardSet; 3], skat: CardSet) -> GameState {
        let forehand = dealer.next();
        let events = Seat::ALL
            .iter()
            .map(|&s| Event::Dealt {
                seat: s,
                hand: hands[s.index()],
                forehand,
            })
            .collect();
        GameState {
            dealer,
            deal: hands,
            dealt_skat: skat,
            hands,
            phase: Phase::Bidding,
            bid: 0,
            high_bidder: None,
            passed: [false; 3],
            to_act: forehand,
            declarer: None,
            picked_up: false,
            contract: None,
            skat,
            trick: TrickState::new(forehand),
            moves: Vec::new(),
            declarer_points: 0,
            declarer_tricks: 0,
            opponent_tricks: 0,
            settlement: None,
            events,
        }
    }

    pub fn forehand(&self) -> Seat {
        self.dealer.next()
    }

    /// Seat expected to act, `None` once finished.
    pub fn to_act(&self) -> Option<Seat> {
        match self.phase {
            Phase::Finished => None,
            Phase::Trick => Some(self.trick.to_move()),
            _ => Some(self.to_act),
        }
    }

    pub fn game(&self) -> Option<GameType> {
        self.contract.map(|c| c.game)
    }

    /// Lowest admissible raise.
    pub fn min_bid(&self) -> u32 {
        bid_ladder().into_iter().find(|&v| v > self.bid).unwrap_or(u32::MAX)
    }

    /// Legal actions for `seat`; bids are listed as the minimal raise only.
    pub fn legal_actions(&self, seat: Seat) -> Vec<Action> {
        if self.to_act() != Some(seat) {
            return Vec::new();
        }
        match self.phase {
            Phase::Bidding => {
                let mut v = vec![Action::Pass];
                if self.min_bid() != u32::MAX {
                    v.insert(0, Action::Bid { value: self.min_bid() });
                }
                v
            }
            Phase::Skat => vec![Action::PickUp],
            Phase::Declaring => Vec::new(),
            Phase::Trick => self.legal_cards().iter().map(|card| Action::Play { card }).collect(),
            Phase::Finished => Vec::new(),
        }
    }

    pub fn legal_cards(&self) -> CardSet {
        match (self.phase, self.game()) {
            (Phase::Trick, Some(g)) => {
                Rules::new(g).playable(self.hands[self.trick.to_move().index()], self.trick.lead())
            }
            _ => CardSet::EMPTY,
        }
    }

    pub fn apply(&mut self, seat: Seat, action: Action) -> Result<(), GameError> {
        let expected = self.to_act().ok_or(GameError::WrongPhase(Phase::Finished))?;
        if seat != expected {
            return Err(GameError::OutOfTurn { expected, actual: seat });
        }
        match (self.phase, action) {
            (Phase::Bidding, Action::Bid { value }) => self.bid_or_pass(seat, Some(value)),
            (Phase::Bidding, Action::Pass) => self.bid_or_pass(seat, None),
            (Phase::Skat, Action::PickUp) => {
                self.hands[seat.index()] |= self.dealt_skat;
                self.picked_up = true;
                self.phase = Phase::Declaring;
                self.events.push(Event::PickedUp {
                    seat,
                    skat: self.dealt_skat,
                });
                Ok(())
            }
            (Phase::Skat | Phase::Declaring, Action::Declare { game, discard, level, ouvert }) => {
                self.declare(seat, game, discard, level, ouvert)
            }
            (Phase::Trick, Action::Play { card }) => self.play(seat, card),
            (p, _) => Err(GameError::WrongPhase(p)),
        }
    }

    fn bid_or_pass(&mut self, seat: Seat, bid: Option<u32>) -> Result<(), GameError> {
        match bid {
            Some(value) => {
                if value <= self.bid || !bid_ladder().contains(&value) {
                    return Err(GameError::BadBid {
                        value,
                        current: self.bid,
                    });
                }
                self.bid = value;
                self.high_bidder = Some(seat);
                self.events.push(Event::Bid { seat, value });
            }
            None => {
                self.passed[seat.index()] = true;
                self.events.push(Event::Pass { seat });
            }
        }
        let active: Vec<Seat> = Seat::ALL.into_iter().filter(|s| !self.passed[s.index()]).collect();
        match (active.len(), self.high_bidder) {
            (0, _) => {
                self.phase = Phase::Finished;
                self.events.push(Event::PassedIn);
                self.events.push(Event::Finished {
                    settlement: None,
                    skat: self.dealt_skat,
                    discard: CardSet::EMPTY,
                });
            }
            (1, Some(winner)) => {
                self.declarer = Some(winner);
                self.phase = Phase::Skat;
                self.to_act = winner;
                self.events.push(Event::AuctionWon {
                    seat: winner,
                    bid: self.bid,
                });
            }
            _ => {
                let mut next = seat.next();
                while self.passed[next.index()] {
                    next = next.next();
                }
                self.to_act = next;
            }
        }
        Ok(())
    }

    fn declare(
        &mut self,
        seat: Seat,
        game: GameType,
        discard: Option<[Card; 2]>,
        level: Level,
        ouvert: bool,
    ) -> Result<(), GameError> {
        let hand_game = self.phase == Phase::Skat;
        if hand_game != discard.is_none() {
            return Err(GameError::BadDiscard);
        }
        let announced = level != Level::Normal || (ouvert && game.is_trump_game());
        if announced && !hand_game {
            return Err(GameError::BadAnnouncement);
        }
        if game == GameType::Null && level != Level::Normal {
            return Err(GameError::BadAnnouncement);
        }
        let level = if ouvert && game.is_trump_game() { Level::Schwarz } else { level };
        if let Some([a, b]) = discard {
            let h = self.hands[seat.index()];
            if a == b || !h.contains(a) || !h.contains(b) {
                return Err(GameError::BadDiscard);
            }
            let d = CardSet::from(a).with(b);
            self.hands[seat.index()] -= d;
            self.skat = d;
        }
        let contract = Contract {
            game,
            level,
            hand: hand_game,
            ouvert,
        };
        self.contract = Some(contract);
        self.phase = Phase::Trick;
        self.trick = TrickState::new(self.forehand());
        self.events.push(Event::Declared {
            seat,
            contract,
            discard: if hand_game { CardSet::EMPTY } else { self.skat },
            open_hand: if ouvert { self.hands[seat.index()] } else { CardSet::EMPTY },
        });
        Ok(())
    }

    fn play(&mut self, seat: Seat, card: Card) -> Result<(), GameError> {
        let game = self.game().expect("declared");
        let rules = Rules::new(game);
        let hand = self.hands[seat.index()];
        if !hand.contains(card) {
            return Err(GameError::NotInHand(card));
        }
        let legal = rules.playable(hand, self.trick.lead());
        if !legal.contains(card) {
            return Err(GameError::MustFollow { card, legal });
        }
        self.hands[seat.index()].remove(card);
        self.trick.push(card);
        self.moves.push(card);
        self.events.push(Event::Played { seat, card });
        if self.trick.is_complete() {
            let c = self.trick.cards();
            let w = rules.winning_index([c[0], c[1], c[2]]);
            let winner = Seat((self.trick.leader.0 + w as u8) % 3);
            let points = self.trick.points();
            if Some(winner) == self.declarer {
                self.declarer_points += points;
                self.declarer_tricks += 1;
            } else {
                self.opponent_tricks += 1;
            }
            self.events.push(Event::TrickTaken { seat: winner, points });
            self.trick = TrickState::new(winner);
            let null_lost = game == GameType::Null && self.declarer_tricks > 0;
            if self.moves.len() == 30 || null_lost {
                self.finish();
            }
        }
        Ok(())
    }

    fn finish(&mut self) {
        let declarer = self.declarer.expect("declared");
        let contract = self.contract.expect("declared");
        let points = self.declarer_points + self.skat.points();
        let own = self.deal[declarer.index()] | self.dealt_skat;
        let s = settle(
            &contract,
            own,
            self.bid,
            points,
            self.declarer_tricks,
            self.opponent_tricks,
        );
        self.settlement = Some(s);
        self.phase = Phase::Finished;
        self.events.push(Event::Finished {
            settlement: Some(s),
            skat: self.dealt_skat,
            discard: self.skat,
        });
    }

    /// Search position of the current trick phase.
    pub fn position(&self) -> Option<SearchPosition> {
        if self.phase != Phase::Trick {
            return None;
        }
        let declarer = self.declarer?;
        let played = self.moves.iter().copied().collect::<CardSet>() - self.trick.card_set();
        Some(SearchPosition {
            game: self.game()?,
            declarer,
            hands: self.hands,
            skat: self.skat,
            trick: self.trick,
            played,
            aspts: self.declarer_points,
            gspts: played.points() - self.declarer_points,
            declarer_tricks: self.declarer_tricks as u8,
            opponent_tricks: self.opponent_tricks as u8,
        })
    }
}
