//! Game sessions for interactive play against the engine.
//!
//! Clients exchange [`Envelope`]s; every state a client sees is derived from
//! the events visible to its seat.

pub mod protocol;
pub mod server;
pub mod session;
pub mod snapshot;

pub use protocol::{Envelope, ErrorPayload, Request, ServiceError};
pub use server::{router, serve};
pub use session::{Service, ServiceConfig, Session};
pub use snapshot::Snapshot;
