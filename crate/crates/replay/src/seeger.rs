//! Extended Seeger scoring.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use skat_core::rules::Settlement;
use skat_core::Seat;

/// Games per normalized series.
pub const SERIES: i64 = 36;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesGame {
    /// `None` for games passed in.
    pub declarer: Option<Seat>,
    pub won: bool,
    /// Signed declarer score: `+V` when won, `-2V` when lost.
    pub score: i64,
}

impl SeriesGame {
    pub fn won(declarer: Seat, value: u32) -> SeriesGame {
        SeriesGame {
            declarer: Some(declarer),
            won: true,
            score: value as i64,
        }
    }

    pub fn lost(declarer: Seat, value: u32) -> SeriesGame {
        SeriesGame {
            declarer: Some(declarer),
            won: false,
            score: -2 * value as i64,
        }
    }

    pub fn passed() -> SeriesGame {
        SeriesGame {
            declarer: None,
            won: false,
            score: 0,
        }
    }

    pub fn settled(declarer: Seat, s: &Settlement) -> SeriesGame {
        SeriesGame {
            declarer: Some(declarer),
            won: s.outcome.won,
            score: s.score,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SeegerError {
    #[error("empty series")]
    EmptySeries,
}

/// Unnormalized score of `player`: game scores and 50 per win minus 50 per
/// loss as declarer, plus 40 for every game another declarer lost.
pub fn seeger_raw(player: Seat, games: &[SeriesGame]) -> i64 {
    games
        .iter()
        .map(|g| match g.declarer {
            Some(d) if d == player => g.score + if g.won { 50 } else { -50 },
            Some(_) if !g.won => 40,
            _ => 0,
        })
        .sum()
}

/// Score of `player` normalized to a 36-game series.
pub fn seeger_score(player: Seat, games: &[SeriesGame]) -> Result<Ratio<i64>, SeegerError> {
    if games.is_empty() {
        return Err(SeegerError::EmptySeries);
    }
    Ok(Ratio::new(seeger_raw(player, games) * SERIES, games.len() as i64))
}
