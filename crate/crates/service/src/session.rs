//! Sessions and request dispatch.

use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use skat_core::game::{Action, Event, GameError, Phase};
use skat_core::gen::random_deal;
use skat_core::policy::PolicyConfig;
use skat_core::table::{Table, TableError};
use skat_core::{CardSet, Seat};
use skat_replay::GameRecord;

use crate::protocol::*;
use crate::snapshot::Snapshot;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub policy: PolicyConfig,
    /// Finished games are appended here in the game log format.
    pub export: Option<PathBuf>,
    /// Analysis default for new sessions.
    pub analysis: bool,
}

pub struct Session {
    pub id: String,
    humans: [bool; 3],
    pub table: Table,
    pub analysis: bool,
    policy: PolicyConfig,
    exported: bool,
}

impl Session {
    pub fn is_human(&self, seat: Seat) -> bool {
        self.humans[seat.index()]
    }

    pub fn events_for(&self, seat: Seat) -> Vec<Event> {
        self.table.state.events.iter().filter_map(|e| e.visible_to(seat)).collect()
    }

    pub fn snapshot(&self, seat: Seat) -> Snapshot {
        Snapshot::from_events(seat, &self.events_for(seat))
    }

    pub fn record(&self) -> Option<GameRecord> {
        GameRecord::from_game(&self.table.state, Some(self.id.clone()))
    }

    fn apply(&mut self, seat: Seat, action: Action) -> Result<Vec<Event>, ServiceError> {
        let before = self.table.state.events.len();
        self.table.apply(seat, action).map_err(|e| match e {
            TableError::Game(g) => ServiceError::Game(g),
            e => ServiceError::Internal(e.to_string()),
        })?;
        Ok(self.table.state.events[before..].iter().filter_map(|e| e.visible_to(seat)).collect())
    }
}

pub struct Service {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

impl Service {
    pub fn new(config: ServiceConfig) -> Service {
        Service {
            config,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        self.sessions
            .lock()
            .expect("session map")
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    /// Answers one request; failures become `error` envelopes.
    pub fn handle(&self, env: Envelope) -> Envelope {
        let seq = env.seq;
        let session = env.session.clone();
        self.dispatch(env)
            .unwrap_or_else(|e| Envelope::new("error", session, seq, e.payload()))
    }

    pub fn handle_text(&self, text: &str) -> String {
        let reply = match serde_json::from_str::<Envelope>(text) {
            Ok(env) => self.handle(env),
            Err(e) => Envelope::new("error", None, 0, ServiceError::BadRequest(e.to_string()).payload()),
        };
        serde_json::to_string(&reply).expect("plain data")
    }

    fn dispatch(&self, env: Envelope) -> Reply {
        let req = Request::parse(&env)?;
        let seq = env.seq;
        if let Request::CreateSession(c) = req {
            return self.create(c, seq);
        }
        let id = env.session.ok_or_else(|| ServiceError::BadRequest("missing session".into()))?;
        let handle = self.session(&id)?;
        let mut s = handle.lock().map_err(|_| ServiceError::Internal("session poisoned".into()))?;
        let sid = Some(id.clone());
        let reply = match req {
            Request::CreateSession(_) => unreachable!("handled above"),
            Request::StateSnapshot(r) => snapshot_reply(&id, seq, &s.snapshot(r.seat)),
            Request::LegalActions(r) => {
                let state = &s.table.state;
                let to_act = state.to_act();
                Envelope::new(
                    "legal_actions",
                    sid,
                    seq,
                    LegalActions {
                        seat: r.seat,
                        to_act,
                        actions: state.legal_actions(r.seat),
                        must_declare: to_act == Some(r.seat) && state.phase == Phase::Declaring,
                    },
                )
            }
            Request::SubmitAction(a) => {
                if !s.is_human(a.seat) {
                    return Err(ServiceError::NotHumanSeat(a.seat));
                }
                let Some(expected) = s.table.state.to_act() else {
                    return Err(ServiceError::GameOver);
                };
                if expected != a.seat {
                    return Err(ServiceError::Game(GameError::OutOfTurn {
                        expected,
                        actual: a.seat,
                    }));
                }
                let events = s.apply(a.seat, a.action)?;
                self.export(&mut s);
                Envelope::new(
                    "action_applied",
                    sid,
                    seq,
                    ActionApplied {
                        seat: a.seat,
                        action: a.action,
                        events,
                    },
                )
            }
            Request::AiStep => {
                let seat = s.table.state.to_act().ok_or(ServiceError::GameOver)?;
                if s.is_human(seat) {
                    return Err(ServiceError::NotAiTurn(seat));
                }
                let start = Instant::now();
                let (action, rec) = s.table.ai_action(&s.policy).ok_or(ServiceError::GameOver)?;
                let elapsed = start.elapsed();
                s.apply(seat, action)?;
                self.export(&mut s);
                let time_pressure = rec.is_some_and(|r| r.time_pressure) || elapsed > s.policy.budget();
                Envelope::new(
                    "ai_action",
                    sid,
                    seq,
                    AiMove {
                        seat,
                        action,
                        analysis: if s.analysis { rec } else { None },
                        elapsed_ms: elapsed.as_millis() as u64,
                        time_pressure,
                    },
                )
            }
            Request::AnalysisToggle(t) => {
                s.analysis = t.enabled;
                Envelope::new("analysis", sid, seq, t)
            }
            Request::ExportGame => {
                let r = s.record().ok_or(ServiceError::NotFinished)?;
                Envelope::new("game_record", sid, seq, ExportedGame { record: r.to_json() })
            }
        };
        Ok(reply)
    }

    fn create(&self, c: CreateSession, seq: u64) -> Reply {
        let mut humans = [false; 3];
        for s in &c.human_seats {
            if s.0 > 2 {
                return Err(ServiceError::BadRequest(format!("no seat {s}")));
            }
            humans[s.index()] = true;
        }
        if c.dealer.0 > 2 {
            return Err(ServiceError::BadRequest(format!("no seat {}", c.dealer)));
        }
        let (hands, skat) = match c.deal {
            Some(d) => {
                let all = d.hands[0] | d.hands[1] | d.hands[2] | d.skat;
                let count = d.hands.iter().map(|h| h.len()).sum::<u32>() + d.skat.len();
                if all != CardSet::DECK || count != 32 || d.hands.iter().any(|h| h.len() != 10) {
                    return Err(ServiceError::BadRequest("deal must split the deck 10/10/10/2".into()));
                }
                (d.hands, d.skat)
            }
            None => {
                let seed = c.seed.unwrap_or_else(|| rand::thread_rng().gen());
                random_deal(&mut ChaCha8Rng::seed_from_u64(seed))
            }
        };
        let policy = c.policy.unwrap_or_else(|| self.config.policy.clone());
        policy.validate().map_err(|e| ServiceError::BadRequest(e.to_string()))?;
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let session = Session {
            id: id.clone(),
            humans,
            table: Table::deal(c.dealer, hands, skat),
            analysis: c.analysis || self.config.analysis,
            policy,
            exported: false,
        };
        let created = SessionCreated {
            session: id.clone(),
            human_seats: Seat::ALL.into_iter().filter(|s| humans[s.index()]).collect(),
            ai_seats: Seat::ALL.into_iter().filter(|s| !humans[s.index()]).collect(),
            analysis: session.analysis,
        };
        self.sessions
            .lock()
            .expect("session map")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(Envelope::new("session_created", Some(id), seq, created))
    }

    fn export(&self, s: &mut Session) {
        if s.exported {
            return;
        }
        let (Some(path), Some(r)) = (&self.config.export, s.record()) else {
            return;
        };
        s.exported = true;
        let line = r.to_json() + "\n";
        let written = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(line.as_bytes()));
        if let Err(e) = written {
            eprintln!("export of {} failed: {e}", s.id);
        }
    }
}
