//! Keyframe demonstrations: recording, landmark frames and kinematic replay.

pub mod keyframe;
pub mod pose;
pub mod script;
pub mod session;
pub mod sim;

use thiserror::Error;

use crate::types::TypeTag;
use crate::world::{Arm, Vec3};

pub use keyframe::{
    describe_landmark, landmark_anchor, landmark_origin, nearest_landmark, FrameRef, GripperCommand, Keyframe,
    LandmarkDescriptor, LowLevelAction,
};
pub use pose::Pose;
pub use script::{pick_place_script, pick_place_steps, DemoScript, GraspStyle, ScriptStep};
pub use session::{begin_demo, DemoResult, DemoSession, RecordedKeyframe};
pub use sim::{execute_low_level, replay, resolve_keyframes, SimSettings, Simulator, Workspace, WorldKeyframe};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DemoError {
    #[error("pose {0:?} is outside the workspace")]
    OutOfWorkspace(Vec3),
    #[error("demonstration has no keyframes")]
    EmptyDemonstration,
    #[error("keyframes use both {0} and {1}")]
    MixedArms(Arm, Arm),
    #[error("keyframe {0} has a non-unit orientation")]
    InvalidOrientation(usize),
    #[error("no keyframe {0}")]
    NoSuchKeyframe(usize),
    #[error("unknown landmark `{0}`")]
    UnknownLandmark(String),
    #[error("no `{1}` instance to stand in for landmark `{0}`")]
    UnresolvedLandmark(String, TypeTag),
    #[error("nothing to grasp near {0:?}")]
    GraspFailed(Vec3),
    #[error("invalid demo script: {0}")]
    InvalidScript(String),
}
