//! Endgame voting: every consistent world is solved open-card after each
//! playable card, and the card winning in the most worlds is recommended
//! when its win ratio clears a confidence gate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cards::Card;
use crate::error::{KnowledgeError, SearchError};
use crate::kbps::Budget;
use crate::knowledge::{KnowledgeView, World};
use crate::rules::{GameType, Rules};
use crate::solver::{SearchPosition, Solver};
use crate::Aborted;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VoteConfig {
    pub world_cap: usize,
    pub confidence: f64,
    /// Weight of the average points (as a fraction of 120) in tie-breaks.
    pub point_weight: f64,
    /// Weight per level reached beyond the contract in tie-breaks.
    pub level_weight: f64,
    /// Draw `world_cap` worlds uniformly with this seed instead of taking
    /// the first ones in enumeration order.
    pub sample_seed: Option<u64>,
    /// Worlds solved for exact values when the leading cards tie on wins.
    pub tiebreak_worlds: usize,
}

impl Default for VoteConfig {
    fn default() -> Self {
        VoteConfig {
            world_cap: 2500,
            confidence: 0.90,
            point_weight: 1.0,
            level_weight: 0.01,
            sample_seed: None,
            tiebreak_worlds: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardTally {
    pub card: Card,
    pub wins: u32,
    pub losses: u32,
    /// Sum over the tie-break worlds of the final points of the mover's side.
    pub point_sum: u64,
    /// Sum over the tie-break worlds of levels reached beyond the contract.
    pub level_sum: u32,
    /// Number of tie-break worlds solved for this card.
    pub valued: u32,
}

impl CardTally {
    pub fn new(card: Card) -> CardTally {
        CardTally {
            card,
            wins: 0,
            losses: 0,
            point_sum: 0,
            level_sum: 0,
            valued: 0,
        }
    }

    pub fn ratio(&self) -> f64 {
        let n = self.wins + self.losses;
        if n == 0 {
            0.0
        } else {
            self.wins as f64 / n as f64
        }
    }

    fn bonus(&self, config: &VoteConfig) -> f64 {
        let n = self.valued.max(1) as f64;
        config.point_weight * self.point_sum as f64 / (120.0 * n) + config.level_weight * self.level_sum as f64 / n
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VoteTally {
    /// One entry per playable card, ascending by bit index.
    pub cards: Vec<CardTally>,
    pub worlds: usize,
    /// Whether the belief space had more worlds than were solved.
    pub truncated: bool,
}

impl VoteTally {
    /// Best card by wins, then the bonus terms, then the lowest bit index.
    pub fn leader(&self, config: &VoteConfig) -> Option<&CardTally> {
        let mut best: Option<&CardTally> = None;
        for t in &self.cards {
            best = match best {
                None => Some(t),
                Some(b) => {
                    let better = t.wins > b.wins || (t.wins == b.wins && t.bonus(config) > b.bonus(config));
                    Some(if better { t } else { b })
                }
            };
        }
        best
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub card: Card,
    pub ratio: f64,
}

/// Worlds to vote over: a prefix of the enumeration or a uniform sample.
pub fn vote_worlds(view: &KnowledgeView, config: &VoteConfig) -> (Vec<World>, bool) {
    let total = view.count_worlds();
    let truncated = total > config.world_cap as u128;
    let worlds = match config.sample_seed {
        Some(seed) if truncated => view.sample_worlds(config.world_cap, &mut ChaCha8Rng::seed_from_u64(seed)),
        _ => view.enumerate_worlds(config.world_cap),
    };
    (worlds, truncated)
}

/// Per-card outcome counts for the seat to move at contract `limit`.
pub fn endgame_tally(
    view: &KnowledgeView,
    limit: u32,
    config: &VoteConfig,
    budget: Budget,
) -> Result<VoteTally, SearchError> {
    if view.trick.to_move() != view.seat {
        return Err(SearchError::NotToMove(view.seat));
    }
    let (worlds, truncated) = vote_worlds(view, config);
    if worlds.is_empty() {
        return Err(KnowledgeError::NoWorlds.into());
    }
    let legal = Rules::new(view.game).playable(view.own(), view.trick.lead());
    let cards: Vec<Card> = legal.iter().collect();
    let declarer_side = view.is_declarer();

    let rows: Result<Vec<Vec<bool>>, Aborted> = worlds
        .par_iter()
        .map_init(
            || Solver::new(view.game, view.declarer),
            |solver, w| {
                if budget.expired() {
                    return Err(Aborted);
                }
                let pos = SearchPosition::from_world(view, w);
                Ok(cards.iter().map(|&c| wins(solver, &pos, c, limit, declarer_side)).collect())
            },
        )
        .collect();
    let rows = rows?;

    let mut tally: Vec<CardTally> = cards.iter().map(|&card| CardTally::new(card)).collect();
    for row in rows {
        for (t, won) in tally.iter_mut().zip(row) {
            if won {
                t.wins += 1;
            } else {
                t.losses += 1;
            }
        }
    }

    // exact values only for the cards tied on the most wins
    let top = tally.iter().map(|t| t.wins).max().unwrap_or(0);
    let tied: Vec<usize> = (0..tally.len()).filter(|&i| tally[i].wins == top).collect();
    if tied.len() > 1 && view.game != GameType::Null && config.tiebreak_worlds > 0 {
        let n = config.tiebreak_worlds.min(worlds.len());
        let step = worlds.len() / n;
        let sample: Vec<&World> = (0..n).map(|i| &worlds[i * step]).collect();
        let values: Result<Vec<Vec<u32>>, Aborted> = sample
            .par_iter()
            .map_init(
                || Solver::new(view.game, view.declarer),
                |solver, w| {
                    if budget.expired() {
                        return Err(Aborted);
                    }
                    let pos = SearchPosition::from_world(view, w);
                    Ok(tied
                        .iter()
                        .map(|&i| solver.value(&pos.play(cards[i]).expect("legal card")))
                        .collect())
                },
            )
            .collect();
        for row in values? {
            for (&i, value) in tied.iter().zip(row) {
                score_value(&mut tally[i], value, limit, declarer_side);
            }
        }
    }
    Ok(VoteTally {
        cards: tally,
        worlds: worlds.len(),
        truncated,
    })
}

fn wins(solver: &mut Solver, pos: &SearchPosition, card: Card, limit: u32, declarer_side: bool) -> bool {
    let child = pos.play(card).expect("legal card");
    if pos.game == GameType::Null {
        return solver.null_safe(&child) == declarer_side;
    }
    solver.decide(&child, limit) == declarer_side
}

fn score_value(t: &mut CardTally, value: u32, limit: u32, declarer_side: bool) {
    t.valued += 1;
    if declarer_side {
        t.point_sum += value as u64;
        t.level_sum += [89, 119].iter().filter(|&&l| l > limit && value > l).count() as u32;
    } else {
        t.point_sum += 120 - value as u64;
        t.level_sum += [30, 0].iter().filter(|&&l| l < limit && value <= l).count() as u32;
    }
}

/// The highest-ratio card if it reaches `config.confidence`.
pub fn endgame_vote(
    view: &KnowledgeView,
    limit: u32,
    config: &VoteConfig,
    budget: Budget,
) -> Result<Option<Vote>, SearchError> {
    let tally = endgame_tally(view, limit, config, budget)?;
    Ok(tally.leader(config).and_then(|t| {
        let ratio = t.ratio();
        (ratio >= config.confidence).then_some(Vote { card: t.card, ratio })
    }))
}
