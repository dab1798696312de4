//! Win cross-tabs and scores over a replayed series.

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use skat_core::{GameType, Seat};

use crate::run::{Bidding, GameOutcome, Mode, ReplayConfig, SourceCounts};
use crate::seeger::{seeger_score, SeriesGame};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub human: bool,
    pub glassbox: bool,
    pub ai: bool,
    pub count: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossTab {
    /// Eight cells ordered (human, glassbox, ai) as binary numbers.
    pub cells: Vec<Cell>,
    pub human_wins: u32,
    pub glassbox_wins: u32,
    pub ai_wins: u32,
    pub games: u32,
}

impl CrossTab {
    fn new() -> CrossTab {
        let cells = (0..8)
            .map(|i| Cell {
                human: i & 4 != 0,
                glassbox: i & 2 != 0,
                ai: i & 1 != 0,
                count: 0,
            })
            .collect();
        CrossTab {
            cells,
            ..Default::default()
        }
    }

    fn add(&mut self, human: bool, glassbox: bool, ai: bool) {
        let i = (human as usize) << 2 | (glassbox as usize) << 1 | ai as usize;
        self.cells[i].count += 1;
        self.games += 1;
        self.human_wins += human as u32;
        self.glassbox_wins += glassbox as u32;
        self.ai_wins += ai as u32;
    }

    pub fn cell(&self, human: bool, glassbox: bool, ai: bool) -> u32 {
        self.cells[(human as usize) << 2 | (glassbox as usize) << 1 | ai as usize].count
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scores {
    /// Extended Seeger score per seat, normalized to 36 games.
    pub seats: [Ratio<i64>; 3],
    pub mean: Ratio<i64>,
}

impl Scores {
    fn of(games: &[SeriesGame]) -> Option<Scores> {
        let seats = [0, 1, 2].map(|s| seeger_score(Seat(s), games).ok());
        let [Some(a), Some(b), Some(c)] = seats else {
            return None;
        };
        Some(Scores {
            seats: [a, b, c],
            mean: (a + b + c) / 3,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub mode: Mode,
    pub bidding: Bidding,
    pub kbps_declarer: bool,
    pub kbps_opponents: bool,
    /// Trump games the computer played.
    pub trump: CrossTab,
    /// Null games the computer played.
    pub null: CrossTab,
    /// Games the computer passed in; left out of the cross-tabs.
    pub folded: u32,
    pub ai_score: Option<Scores>,
    pub human_score: Option<Scores>,
    pub sources: SourceCounts,
    /// Not part of the CSV.
    pub wall_ms: u64,
}

impl SeriesReport {
    pub fn build(config: &ReplayConfig, outcomes: &[GameOutcome], wall_ms: u64) -> SeriesReport {
        let mut trump = CrossTab::new();
        let mut null = CrossTab::new();
        let mut folded = 0;
        let mut sources = SourceCounts::default();
        let mut ai_games = Vec::new();
        let mut human_games = Vec::new();
        for o in outcomes {
            human_games.push(SeriesGame::settled(o.human_declarer, &o.human));
            let Some(ai) = &o.ai else {
                folded += 1;
                continue;
            };
            sources.merge(&ai.sources);
            ai_games.push(SeriesGame::settled(ai.declarer, &ai.settlement));
            let tab = if o.game == GameType::Null { &mut null } else { &mut trump };
            tab.add(o.human.outcome.won, o.glassbox_won, ai.settlement.outcome.won);
        }
        SeriesReport {
            mode: config.mode,
            bidding: config.bidding,
            kbps_declarer: config.policy.kbps_declarer,
            kbps_opponents: config.policy.kbps_opponents,
            trump,
            null,
            folded,
            ai_score: Scores::of(&ai_games),
            human_score: Scores::of(&human_games),
            sources,
            wall_ms,
        }
    }

    /// Cross-tab rows and score lines; identical for identical outcomes.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,human_won,glassbox_won,ai_won,count\n");
        for (name, tab) in [("trump", &self.trump), ("null", &self.null)] {
            for c in &tab.cells {
                writeln!(out, "{name},{},{},{},{}", c.human, c.glassbox, c.ai, c.count).unwrap();
            }
            writeln!(
                out,
                "{name}_total,{},{},{},{}",
                tab.human_wins, tab.glassbox_wins, tab.ai_wins, tab.games
            )
            .unwrap();
        }
        writeln!(out, "folded,,,,{}", self.folded).unwrap();
        for (who, s) in [("ai", &self.ai_score), ("human", &self.human_score)] {
            if let Some(s) = s {
                for (i, v) in s.seats.iter().enumerate() {
                    writeln!(out, "score_{who}_p{i},,,,{}", decimal(v)).unwrap();
                }
                writeln!(out, "score_{who}_mean,,,,{}", decimal(&s.mean)).unwrap();
            }
        }
        writeln!(
            out,
            "sources,killer={} endgame={} hope={} expert={} time_pressure={},,,",
            self.sources.killer, self.sources.endgame, self.sources.hope, self.sources.expert, self.sources.time_pressure
        )
        .unwrap();
        out
    }
}

/// Two decimal places, rounded half away from zero.
pub fn decimal(r: &Ratio<i64>) -> String {
    let scaled = (r * 100).round().to_integer();
    let sign = if scaled < 0 { "-" } else { "" };
    let a = scaled.abs();
    format!("{sign}{}.{:02}", a / 100, a % 100)
}
