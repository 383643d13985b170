//! The interactive teach, correct, plan and execute cycle: session state,
//! debug summaries, persistence, the benchmark runner and the REST API.

pub mod api;
pub mod bench;
pub mod debug;
pub mod persist;
pub mod session;

pub use debug::{DebugReport, Hint, HintKind, GOAL_HINT};
pub use persist::SCHEMA_VERSION;
pub use session::{
    parse_literal, ActiveDemo, Event, Execution, PlanStatus, Problem, ProblemSource, Session,
    SessionError, SolveJob, StepReport, StoredPlan,
};
