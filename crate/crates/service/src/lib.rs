//! Planning sessions, the HTTP API and the command line around the
//! scheduling engine.
//!
//! A session starts from a problem instance, solves it, and then takes
//! constraint changes one at a time, either as requests in everyday
//! language handled by the agents or as patch text. Each change is solved
//! before the planner accepts or discards it.

pub mod api;
pub mod config;
pub mod diff;
pub mod engine;
pub mod error;
pub mod export;
pub mod session;

pub use config::ServiceConfig;
pub use diff::{diff_schedules, CellChange};
pub use engine::{
    ConstrainRequest, ConstrainResponse, DiffSource, DiffView, Engine, EngineOptions, HistoryEntry, ScheduleView,
    SessionInfo, ORIG_SCHEDULE_KEY, T_PERTURB_KEY,
};
pub use error::ServiceError;
pub use export::{export_schedule, ScheduleGrid, HOUR_MARK};
pub use session::{Event, Mode, Pending, Session, Step, Trace};
