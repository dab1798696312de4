use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use skat_cli::{analyze, load_config, policy, prove, read_log, PolicyFlags};
use skat_replay::selfplay::selfplay;
use skat_replay::synth::planted_wins;
use skat_replay::{emit_log, replay, Bidding, Mode, ReplayConfig};
use skat_service::{Service, ServiceConfig};

#[derive(Parser)]
#[command(name = "skat", version, about = "Skat engine with knowledge-based killer search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recommend a card for the seat to move in a logged game.
    Analyze {
        log: PathBuf,
        /// Zero-based game in the log.
        #[arg(long, default_value_t = 0)]
        game: usize,
        /// Cards played before the position.
        #[arg(long, default_value_t = 0)]
        ply: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: PolicyFlags,
    },
    /// Run the killer searches on a logged position.
    Prove {
        log: PathBuf,
        #[arg(long, default_value_t = 0)]
        game: usize,
        #[arg(long, default_value_t = 0)]
        ply: usize,
        /// Also tally the endgame vote.
        #[arg(long)]
        vote: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: PolicyFlags,
    },
    /// Replay a game log with computer seats and report the series.
    Replay {
        log: PathBuf,
        /// Use only the first N games.
        #[arg(long)]
        games: Option<usize>,
        #[arg(long, default_value = "ai-all")]
        mode: Mode,
        #[arg(long, default_value = "human")]
        bidding: Bidding,
        /// Write the report as CSV here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: PolicyFlags,
    },
    /// Play deals between computer players and write them as a log.
    Selfplay {
        #[arg(long, default_value_t = 100)]
        games: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only deals the declarer wins by at most this many points with open cards.
        #[arg(long)]
        planted_margin: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        flags: PolicyFlags,
    },
    /// Serve the table protocol over WebSocket.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Service settings (policy, export path, analysis default).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Append finished games to this log.
        #[arg(long)]
        export: Option<PathBuf>,
        #[command(flatten)]
        flags: PolicyFlags,
    },
}

fn pick(records: Vec<skat_replay::GameRecord>, game: usize) -> anyhow::Result<skat_replay::GameRecord> {
    let n = records.len();
    records.into_iter().nth(game).with_context(|| format!("game {game} not in log of {n}"))
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Analyze { log, game, ply, config, flags } => {
            let p = policy(config.as_deref(), &flags)?;
            let r = pick(read_log(&log)?, game)?;
            println!("{}", serde_json::to_string_pretty(&analyze(&r, ply, &p)?)?);
        }
        Command::Prove { log, game, ply, vote, config, flags } => {
            let p = policy(config.as_deref(), &flags)?;
            let r = pick(read_log(&log)?, game)?;
            println!("{}", serde_json::to_string_pretty(&prove(&r, ply, &p, vote)?)?);
        }
        Command::Replay { log, games, mode, bidding, report, config, flags } => {
            let p = policy(config.as_deref(), &flags)?;
            let mut records = read_log(&log)?;
            if let Some(n) = games {
                records.truncate(n);
            }
            let cfg = ReplayConfig { mode, bidding, policy: p };
            let (_, rep) = replay(&records, &cfg)?;
            match report {
                Some(path) => {
                    std::fs::write(&path, rep.to_csv()).with_context(|| format!("writing {}", path.display()))?;
                    eprintln!("{} games in {} ms, report in {}", records.len(), rep.wall_ms, path.display());
                }
                None => print!("{}", rep.to_csv()),
            }
        }
        Command::Selfplay { games, seed, planted_margin, out, config, flags } => {
            let p = policy(config.as_deref(), &flags)?;
            let records = match planted_margin {
                Some(m) => planted_wins(games, seed, m, &p)?,
                None => selfplay(games, seed, &p)?,
            };
            std::fs::write(&out, emit_log(&records)).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} games written to {}", records.len(), out.display());
        }
        Command::Serve { port, host, config, export, flags } => {
            let mut svc: ServiceConfig = match config {
                Some(p) => load_config(&p)?,
                None => ServiceConfig::default(),
            };
            svc.policy = flags.apply(svc.policy)?;
            if export.is_some() {
                svc.export = export;
            }
            let addr: SocketAddr = format!("{host}:{port}").parse()?;
            eprintln!("listening on ws://{addr}/ws");
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(skat_service::serve(Arc::new(Service::new(svc)), addr))?;
        }
    }
    Ok(())
}
