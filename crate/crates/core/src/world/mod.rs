//! Geometric scenes, symbolic states and perception.

pub mod config;
pub mod geometry;
pub mod perception;
pub mod scene;
pub mod state;

use thiserror::Error;

use crate::logic::Atom;
use crate::types::TypeTag;

pub use config::{classify_type, IrpConfig, PrototypeTable, StackRule, StackabilityRules, Thresholds};
pub use geometry::{BaseBox, Dims, Vec3};
pub use perception::{apply_corrections, static_atoms, perceive, PerceptionMode, PerceptionParams};
pub use scene::{table_positions, Arm, ObjectInstance, PositionInstance, Scene, Support};
pub use state::{Correction, StateDiff, WorldState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("no prototype matches dims {0:?}")]
    UnknownType(Dims),
    #[error("dims match several prototypes: {0:?}")]
    AmbiguousType(Vec<TypeTag>),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("duplicate instance id `{0}`")]
    DuplicateId(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("`{0}` is both added and deleted")]
    OverlappingEffects(Atom),
    #[error("inconsistent correction: {0}")]
    InconsistentCorrection(String),
    #[error("type violation: {0}")]
    TypeViolation(String),
}
