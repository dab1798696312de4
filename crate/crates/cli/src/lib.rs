//! Subcommands of the `skat` binary.

use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use skat_core::endgame::endgame_tally;
use skat_core::game::Action;
use skat_core::error::SearchError;
use skat_core::kbps::{killer_card, AssignmentConstraint, Budget, Prover};
use skat_core::policy::{card_number, choose_card, PolicyConfig};
use skat_core::table::Table;
use skat_core::KnowledgeView;
use skat_replay::{parse_log, GameRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn on(self) -> bool {
        self == Switch::On
    }
}

/// Flags that override single policy fields.
#[derive(Clone, Debug, Default, Args)]
pub struct PolicyFlags {
    /// First card number of the approximate killer search.
    #[arg(long)]
    pub akbps_start: Option<u32>,
    /// First card number of the exact killer search.
    #[arg(long)]
    pub kbps_start: Option<u32>,
    /// Time per card decision in milliseconds.
    #[arg(long)]
    pub budget_ms: Option<u64>,
    /// Most worlds solved by the endgame vote.
    #[arg(long)]
    pub worlds: Option<usize>,
    /// Win ratio the endgame vote must reach.
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long)]
    pub kbps_declarer: Option<Switch>,
    #[arg(long)]
    pub kbps_opponents: Option<Switch>,
}

impl PolicyFlags {
    pub fn apply(&self, mut p: PolicyConfig) -> anyhow::Result<PolicyConfig> {
        if let Some(v) = self.akbps_start {
            p.akbps_start_card = v;
        }
        if let Some(v) = self.kbps_start {
            p.kbps_start_card = v;
        }
        if let Some(v) = self.budget_ms {
            p.decision_budget_ms = v;
        }
        if let Some(v) = self.worlds {
            p.world_cap = v;
        }
        if let Some(v) = self.confidence {
            p.confidence = v;
        }
        if let Some(v) = self.kbps_declarer {
            p.kbps_declarer = v.on();
        }
        if let Some(v) = self.kbps_opponents {
            p.kbps_opponents = v.on();
        }
        p.validate()?;
        Ok(p)
    }
}

/// Reads a TOML file when the extension says so, JSON otherwise.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(anyhow::Error::from)
    } else {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

pub fn policy(config: Option<&Path>, flags: &PolicyFlags) -> anyhow::Result<PolicyConfig> {
    let base = match config {
        Some(p) => load_config(p)?,
        None => PolicyConfig::default(),
    };
    flags.apply(base)
}

pub fn read_log(path: &Path) -> anyhow::Result<Vec<GameRecord>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_log(&text).with_context(|| format!("in {}", path.display()))
}

/// The logged game after its first `ply` cards.
pub fn position(record: &GameRecord, ply: usize) -> anyhow::Result<Table> {
    if ply >= record.moves.len() {
        bail!("ply {ply} is past the last card ({} logged)", record.moves.len());
    }
    let mut t = Table::new(record.setup()?);
    for &card in &record.moves[..ply] {
        let seat = t.state.trick.to_move();
        t.apply(seat, Action::Play { card })?;
    }
    Ok(t)
}

fn mover_view(t: &Table) -> anyhow::Result<&KnowledgeView> {
    let seat = t.state.trick.to_move();
    t.view(seat).context("no view for the seat to move")
}

/// The policy's card with its provenance.
pub fn analyze(record: &GameRecord, ply: usize, config: &PolicyConfig) -> anyhow::Result<Value> {
    let t = position(record, ply)?;
    let view = mover_view(&t)?;
    let contract = t.state.contract.context("no contract")?;
    let start = Instant::now();
    let rec = choose_card(view, &contract, config, start + config.budget());
    Ok(json!({
        "ply": ply,
        "seat": view.seat,
        "declarer": view.declarer,
        "card_number": card_number(view),
        "worlds": view.count_worlds() as u64,
        "legal": t.state.legal_cards(),
        "recommendation": rec,
        "elapsed_ms": start.elapsed().as_millis() as u64,
    }))
}

fn killer_json(view: &KnowledgeView, limit: u32, constraint: Option<&AssignmentConstraint>, budget: Duration) -> Value {
    let start = Instant::now();
    let result = Prover::new(view, constraint, Budget::within(budget)).and_then(|mut p| killer_card(&mut p, limit));
    let ms = start.elapsed().as_millis() as u64;
    match result {
        Ok(k) => json!({ "killer": k, "elapsed_ms": ms }),
        Err(SearchError::Aborted(_)) => json!({ "aborted": true, "elapsed_ms": ms }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Exact and approximate killer searches, and optionally the endgame tally.
pub fn prove(record: &GameRecord, ply: usize, config: &PolicyConfig, vote: bool) -> anyhow::Result<Value> {
    let t = position(record, ply)?;
    let contract = t.state.contract.context("no contract")?;
    let limit = contract.limit().unwrap_or(0) as u32;
    let view = mover_view(&t)?;
    let sound = view.clone().with_heuristics(skat_core::Heuristics {
        conventions: false,
        ..config.heuristics
    });
    let constraint = AssignmentConstraint::imbalance(config.imbalance_cap);
    let mut out = json!({
        "ply": ply,
        "seat": view.seat,
        "limit": limit,
        "card_number": card_number(view),
        "exact": killer_json(&sound, limit, None, config.budget()),
        "approximate": killer_json(&sound, limit, Some(&constraint), config.budget()),
    });
    if vote {
        let v = view.clone().with_heuristics(config.heuristics);
        out["vote"] = match endgame_tally(&v, limit, &config.vote(), Budget::within(config.budget())) {
            Ok(tally) => serde_json::to_value(tally)?,
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    Ok(out)
}
