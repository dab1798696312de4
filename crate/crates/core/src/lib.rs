//! Skat rules, per-seat card knowledge and the search engines built on it.

pub mod cards;
pub mod endgame;
pub mod error;
pub mod game;
pub mod gen;
pub mod kbps;
pub mod knowledge;
pub mod placement;
pub mod policy;
pub mod rules;
pub mod solver;
pub mod table;

pub use cards::{Card, CardSet, Rank, Suit};
pub use error::{Aborted, KnowledgeError, ParseError, PlayError, RulesError};
pub use knowledge::{init_view, Heuristics, KnowledgeSets, KnowledgeView, Role, World};
pub use rules::{Contract, GameType, Level, Rules, Seat, TrickState};
pub use solver::{dd_best_card, dd_decide, dd_null, dd_value, SearchPosition, Solver};
