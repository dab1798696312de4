//! A game in progress together with each seat's knowledge view, and the
//! computer player's action for any seat.

use std::time::Instant;

use crate::error::KnowledgeError;
use crate::game::{Action, Event, GameError, GameState, Phase};
use crate::knowledge::KnowledgeView;
use crate::policy::{bid_action, choose_card, pick_game, PolicyConfig, Recommendation};
use crate::rules::{Level, Seat};
use crate::cards::CardSet;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TableError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("knowledge of seat {seat}: {source}")]
    Knowledge { seat: Seat, source: KnowledgeError },
}

#[derive(Clone, Debug)]
pub struct Table {
    pub state: GameState,
    views: [Option<KnowledgeView>; 3],
}

impl Table {
    pub fn new(state: GameState) -> Table {
        let mut t = Table {
            state,
            views: [None, None, None],
        };
        if t.state.phase == Phase::Trick {
            t.build_views().expect("views of a declared game");
        }
        t
    }

    pub fn deal(dealer: Seat, hands: [CardSet; 3], skat: CardSet) -> Table {
        Table::new(GameState::new(dealer, hands, skat))
    }

    pub fn view(&self, seat: Seat) -> Option<&KnowledgeView> {
        self.views[seat.index()].as_ref()
    }

    pub fn apply(&mut self, seat: Seat, action: Action) -> Result<(), TableError> {
        self.state.apply(seat, action)?;
        match action {
            Action::Declare { .. } => self.build_views()?,
            Action::Play { card } => {
                for s in Seat::ALL {
                    if let Some(v) = &self.views[s.index()] {
                        let next = v
                            .observe_play(seat, card)
                            .map_err(|source| TableError::Knowledge { seat: s, source })?;
                        self.views[s.index()] = Some(next);
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn build_views(&mut self) -> Result<(), TableError> {
        let declarer = self.state.declarer.expect("declared");
        let contract = self.state.contract.expect("declared");
        let forehand = self.state.forehand();
        let open = self.state.events.iter().find_map(|e| match e {
            Event::Declared { open_hand, .. } if !open_hand.is_empty() => Some(*open_hand),
            _ => None,
        });
        for s in Seat::ALL {
            let known_skat = (s == declarer && !contract.hand).then_some(self.state.skat);
            let mut v = KnowledgeView::init(s, self.state.hands[s.index()], contract.game, declarer, known_skat, forehand)
                .map_err(|source| TableError::Knowledge { seat: s, source })?;
            if let (Some(h), true) = (open, s != declarer) {
                v = v
                    .observe_open_hand(declarer, h)
                    .map_err(|source| TableError::Knowledge { seat: s, source })?;
            }
            self.views[s.index()] = Some(v);
        }
        Ok(())
    }

    /// The computer player's action for the seat to act, with the card
    /// recommendation during trick play. `None` when the game is over.
    pub fn ai_action(&self, config: &PolicyConfig) -> Option<(Action, Option<Recommendation>)> {
        let seat = self.state.to_act()?;
        let hand = self.state.hands[seat.index()];
        Some(match self.state.phase {
            Phase::Bidding => match bid_action(hand, self.state.bid) {
                Some(value) => (Action::Bid { value }, None),
                None => (Action::Pass, None),
            },
            Phase::Skat => (Action::PickUp, None),
            Phase::Declaring => {
                let choice = pick_game(hand, self.state.bid);
                (
                    Action::Declare {
                        game: choice.game,
                        discard: Some(choice.discard),
                        level: Level::Normal,
                        ouvert: false,
                    },
                    None,
                )
            }
            Phase::Trick => {
                let view = self.view(seat)?;
                let contract = self.state.contract?;
                let r = choose_card(view, &contract, config, Instant::now() + config.budget());
                (Action::Play { card: r.card }, Some(r))
            }
            Phase::Finished => return None,
        })
    }

    /// Plays the computer player for every seat until the game ends.
    pub fn play_out(&mut self, config: &PolicyConfig) -> Result<Vec<Option<Recommendation>>, TableError> {
        let mut recs = Vec::new();
        while let Some((action, r)) = self.ai_action(config) {
            let seat = self.state.to_act().expect("to act");
            self.apply(seat, action)?;
            recs.push(r);
        }
        Ok(recs)
    }
}
