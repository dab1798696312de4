//! Game logs, replay with computer seats, open-card comparison and
//! extended Seeger reports.

pub mod record;
pub mod report;
pub mod run;
pub mod seeger;
pub mod selfplay;
pub mod synth;

pub use record::{emit_log, parse_log, parse_record, DealError, GameRecord, LogError, RecordError, RecordResult};
pub use report::{CrossTab, Scores, SeriesReport};
pub use run::{glassbox, replay_all, replay_game, Bidding, GameOutcome, Mode, ReplayConfig, ReplayError};
pub use seeger::{seeger_raw, seeger_score, SeriesGame};

use std::time::Instant;

/// Replays `records` and summarizes them.
pub fn replay(records: &[GameRecord], config: &ReplayConfig) -> Result<(Vec<GameOutcome>, SeriesReport), ReplayError> {
    let start = Instant::now();
    let outcomes = replay_all(records, config)?;
    let report = SeriesReport::build(config, &outcomes, start.elapsed().as_millis() as u64);
    Ok((outcomes, report))
}
