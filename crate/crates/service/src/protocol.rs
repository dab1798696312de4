//! JSON envelopes exchanged with clients.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use skat_core::game::{Action, Event, GameError};
use skat_core::policy::{PolicyConfig, Recommendation};
use skat_core::{CardSet, Seat};

use crate::snapshot::Snapshot;

/// Every message in either direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub session: Option<String>,
    #[serde(default)]
    pub seq: u64,
    #[serde(default)]
    pub payload: Value,
}

impl Envelope {
    pub fn new(kind: &str, session: Option<String>, seq: u64, payload: impl Serialize) -> Envelope {
        Envelope {
            kind: kind.to_string(),
            session,
            seq,
            payload: serde_json::to_value(payload).expect("plain data"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DealSpec {
    pub hands: [CardSet; 3],
    pub skat: CardSet,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CreateSession {
    /// Seats played by clients; the others are computer players.
    pub human_seats: Vec<Seat>,
    pub dealer: Seat,
    /// Seed for a random deal, ignored when `deal` is given.
    pub seed: Option<u64>,
    pub deal: Option<DealSpec>,
    pub analysis: bool,
    pub policy: Option<PolicyConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeatRequest {
    pub seat: Seat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitAction {
    pub seat: Seat,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisToggle {
    pub enabled: bool,
}

/// Parsed client request.
#[derive(Clone, Debug, PartialEq)]
pub enum Request {
    CreateSession(CreateSession),
    StateSnapshot(SeatRequest),
    LegalActions(SeatRequest),
    SubmitAction(SubmitAction),
    AiStep,
    AnalysisToggle(AnalysisToggle),
    ExportGame,
}

impl Request {
    pub fn parse(env: &Envelope) -> Result<Request, ServiceError> {
        fn body<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, ServiceError> {
            let v = if v.is_null() { Value::Object(Default::default()) } else { v.clone() };
            serde_json::from_value(v).map_err(|e| ServiceError::BadRequest(e.to_string()))
        }
        let p = &env.payload;
        Ok(match env.kind.as_str() {
            "create_session" => Request::CreateSession(body(p)?),
            "state_snapshot" => Request::StateSnapshot(body(p)?),
            "legal_actions" => Request::LegalActions(body(p)?),
            "submit_action" => Request::SubmitAction(body(p)?),
            "ai_step" => Request::AiStep,
            "analysis_toggle" => Request::AnalysisToggle(body(p)?),
            "export_game" => Request::ExportGame,
            other => return Err(ServiceError::BadRequest(format!("unknown message type {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session: String,
    pub human_seats: Vec<Seat>,
    pub ai_seats: Vec<Seat>,
    pub analysis: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegalActions {
    pub seat: Seat,
    pub to_act: Option<Seat>,
    /// Bids are listed as the minimal raise; empty when it is not this seat's turn.
    pub actions: Vec<Action>,
    /// The seat holds twelve cards and must send a `declare` action.
    pub must_declare: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionApplied {
    pub seat: Seat,
    pub action: Action,
    /// Events caused by the action, as the acting seat sees them.
    pub events: Vec<Event>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AiMove {
    pub seat: Seat,
    pub action: Action,
    /// Present when analysis is on and the move is a card.
    pub analysis: Option<Recommendation>,
    pub elapsed_ms: u64,
    pub time_pressure: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedGame {
    /// One line of the game log format.
    pub record: String,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ServiceError {
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error(transparent)]
    Game(GameError),
    #[error("seat {0} is played by the computer")]
    NotHumanSeat(Seat),
    #[error("seat {0} to act is played by a client")]
    NotAiTurn(Seat),
    #[error("the game is over")]
    GameOver,
    #[error("the game is not finished")]
    NotFinished,
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub code: String,
    pub message: String,
    /// Rule violation details, e.g. the legal cards for `must_follow`.
    pub reason: Option<GameError>,
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::UnknownSession(_) => "unknown_session",
            ServiceError::Game(GameError::OutOfTurn { .. }) => "out_of_turn",
            ServiceError::Game(GameError::WrongPhase(_)) => "wrong_phase",
            ServiceError::Game(_) => "illegal_action",
            ServiceError::NotHumanSeat(_) => "not_human_seat",
            ServiceError::NotAiTurn(_) => "not_ai_turn",
            ServiceError::GameOver => "game_over",
            ServiceError::NotFinished => "not_finished",
            ServiceError::Internal(_) => "internal",
        }
    }

    pub fn payload(&self) -> ErrorPayload {
        ErrorPayload {
            code: self.code().to_string(),
            message: self.to_string(),
            reason: match self {
                ServiceError::Game(e) => Some(e.clone()),
                _ => None,
            },
        }
    }
}

pub type Reply = Result<Envelope, ServiceError>;

pub fn snapshot_reply(session: &str, seq: u64, s: &Snapshot) -> Envelope {
    Envelope::new("snapshot", Some(session.to_string()), seq, s)
}
