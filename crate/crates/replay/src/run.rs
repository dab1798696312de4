//! Replays logged games with computer players in some or all seats.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use skat_core::game::{Action, Event, GameState, Phase};
use skat_core::policy::{best_discard, PolicyConfig, Recommendation, Source};
use skat_core::rules::Settlement;
use skat_core::table::{Table, TableError};
use skat_core::{dd_decide, dd_null, Card, Contract, GameType, Seat};

use crate::record::{GameRecord, RecordError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    AiAll,
    AiDeclarer,
    AiOpponents,
}

impl Mode {
    pub fn is_ai(self, seat: Seat, declarer: Seat) -> bool {
        match self {
            Mode::AiAll => true,
            Mode::AiDeclarer => seat == declarer,
            Mode::AiOpponents => seat != declarer,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::AiAll => "ai-all",
            Mode::AiDeclarer => "ai-declarer",
            Mode::AiOpponents => "ai-opponents",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "ai-all" | "ai-all-seats" => Ok(Mode::AiAll),
            "ai-declarer" | "ai-declarer-only" => Ok(Mode::AiDeclarer),
            "ai-opponents" | "ai-opponents-only" => Ok(Mode::AiOpponents),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// Where bidding, game choice and the discard come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bidding {
    /// Everything as logged.
    #[default]
    Human,
    /// Logged auction and game, discard chosen by the computer.
    AiDiscard,
    /// The computer bids, picks the game and discards; it may pass the game in.
    Ai,
}

impl Bidding {
    pub fn name(self) -> &'static str {
        match self {
            Bidding::Human => "human",
            Bidding::AiDiscard => "ai-discard",
            Bidding::Ai => "ai",
        }
    }
}

impl FromStr for Bidding {
    type Err = String;
    fn from_str(s: &str) -> Result<Bidding, String> {
        match s {
            "human" => Ok(Bidding::Human),
            "ai-discard" => Ok(Bidding::AiDiscard),
            "ai" => Ok(Bidding::Ai),
            _ => Err(format!("unknown bidding {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayConfig {
    pub mode: Mode,
    #[serde(default)]
    pub bidding: Bidding,
    #[serde(default)]
    pub policy: PolicyConfig,
}

impl ReplayConfig {
    pub fn new(mode: Mode, policy: PolicyConfig) -> ReplayConfig {
        ReplayConfig {
            mode,
            bidding: Bidding::Human,
            policy,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub killer: u32,
    pub endgame: u32,
    pub hope: u32,
    pub expert: u32,
    pub time_pressure: u32,
}

impl SourceCounts {
    pub fn add(&mut self, r: &Recommendation) {
        match r.source {
            Source::Killer => self.killer += 1,
            Source::Endgame => self.endgame += 1,
            Source::Hope => self.hope += 1,
            Source::Expert => self.expert += 1,
        }
        if r.time_pressure {
            self.time_pressure += 1;
        }
    }

    pub fn merge(&mut self, o: &SourceCounts) {
        self.killer += o.killer;
        self.endgame += o.endgame;
        self.hope += o.hope;
        self.expert += o.expert;
        self.time_pressure += o.time_pressure;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiGame {
    pub declarer: Seat,
    pub contract: Contract,
    pub settlement: Settlement,
    pub moves: Vec<Card>,
    pub sources: SourceCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub id: Option<String>,
    pub game: GameType,
    pub human_declarer: Seat,
    pub human: Settlement,
    pub glassbox_won: bool,
    /// `None` when the computer passed the game in.
    pub ai: Option<AiGame>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error(transparent)]
    Record(#[from] RecordError),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Open-card result of the logged contract after the logged skat exchange.
pub fn glassbox(record: &GameRecord) -> Result<bool, RecordError> {
    let g = record.setup()?;
    let pos = g.position().expect("trick phase");
    let contract = record.contract;
    Ok(match contract.limit() {
        Some(limit) => dd_decide(&pos, limit as u32),
        None => dd_null(&pos),
    })
}

/// Cards each seat played in the log, in order.
fn logged_cards(record: &GameRecord) -> Result<[Vec<Card>; 3], RecordError> {
    let g = record.replay()?;
    let mut out: [Vec<Card>; 3] = Default::default();
    for e in &g.events {
        if let Event::Played { seat, card } = e {
            out[seat.index()].push(*card);
        }
    }
    Ok(out)
}

fn ai_setup(record: &GameRecord, config: &ReplayConfig) -> Result<Option<GameState>, ReplayError> {
    match config.bidding {
        Bidding::Human => Ok(Some(record.setup()?)),
        Bidding::AiDiscard if record.contract.hand => Ok(Some(record.setup()?)),
        Bidding::AiDiscard => {
            let mut g = record.auction()?;
            let d = record.declarer;
            g.apply(d, Action::PickUp).map_err(RecordError::Contract)?;
            let discard = best_discard(g.hands[d.index()], record.contract.game);
            let declare = Action::Declare {
                game: record.contract.game,
                discard: Some(discard),
                level: record.contract.level,
                ouvert: record.contract.ouvert,
            };
            g.apply(d, declare).map_err(RecordError::Contract)?;
            Ok(Some(g))
        }
        Bidding::Ai => {
            let mut t = Table::deal(record.dealer, record.hands, record.skat);
            while matches!(t.state.phase, Phase::Bidding | Phase::Skat | Phase::Declaring) {
                let seat = t.state.to_act().expect("to act");
                let (a, _) = t.ai_action(&config.policy).expect("to act");
                t.apply(seat, a)?;
            }
            Ok((t.state.phase == Phase::Trick).then_some(t.state))
        }
    }
}

/// Plays one logged game with the configured seats taken over.
pub fn replay_game(record: &GameRecord, config: &ReplayConfig) -> Result<GameOutcome, ReplayError> {
    let human = record.settlement()?;
    let glassbox_won = glassbox(record)?;
    let logged = logged_cards(record)?;
    let ai = match ai_setup(record, config)? {
        None => None,
        Some(state) => {
            let declarer = state.declarer.expect("declared");
            let contract = state.contract.expect("declared");
            let mut t = Table::new(state);
            let mut sources = SourceCounts::default();
            while let Some(seat) = t.state.to_act() {
                let legal = t.state.legal_cards();
                let follow = (!config.mode.is_ai(seat, declarer))
                    .then(|| logged[seat.index()].iter().copied().find(|&c| legal.contains(c)))
                    .flatten();
                let card = match follow {
                    Some(c) => c,
                    None => {
                        let (a, r) = t.ai_action(&config.policy).expect("to act");
                        if let Some(r) = r {
                            sources.add(&r);
                        }
                        match a {
                            Action::Play { card } => card,
                            _ => unreachable!("trick phase"),
                        }
                    }
                };
                t.apply(seat, Action::Play { card })?;
            }
            Some(AiGame {
                declarer,
                contract,
                settlement: t.state.settlement.expect("finished"),
                moves: t.state.moves.clone(),
                sources,
            })
        }
    };
    Ok(GameOutcome {
        id: record.id.clone(),
        game: record.contract.game,
        human_declarer: record.declarer,
        human,
        glassbox_won,
        ai,
    })
}

/// Replays every record, in parallel, keeping the log order.
pub fn replay_all(records: &[GameRecord], config: &ReplayConfig) -> Result<Vec<GameOutcome>, ReplayError> {
    records.par_iter().map(|r| replay_game(r, config)).collect()
}
