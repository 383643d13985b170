use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::pose::Pose;
use super::DemoError;
use crate::types::TypeTag;
use crate::world::{Arm, Dims, Scene, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GripperCommand {
    Open,
    Close,
}

/// What a landmark frame was attached to at demonstration time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkDescriptor {
    #[serde(rename = "type")]
    pub ty: TypeTag,
    /// Zero for positions.
    pub dims: Dims,
    pub original_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameRef {
    Base,
    Landmark(LandmarkDescriptor),
}

impl FrameRef {
    pub fn landmark(&self) -> Option<&LandmarkDescriptor> {
        match self {
            FrameRef::Base => None,
            FrameRef::Landmark(d) => Some(d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub arm: Arm,
    /// Expressed in `frame`.
    pub pose: Pose,
    pub frame: FrameRef,
    pub gripper: GripperCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowLevelAction {
    pub name: String,
    pub keyframes: Vec<Keyframe>,
}

impl LowLevelAction {
    pub fn arm(&self) -> Option<Arm> {
        self.keyframes.first().map(|k| k.arm)
    }

    /// Non-empty, single-arm, normalized orientations.
    pub fn validate(&self) -> Result<(), DemoError> {
        let first = self.keyframes.first().ok_or(DemoError::EmptyDemonstration)?;
        for (i, k) in self.keyframes.iter().enumerate() {
            if k.arm != first.arm {
                return Err(DemoError::MixedArms(first.arm, k.arm));
            }
            if !k.pose.is_normalized() {
                return Err(DemoError::InvalidOrientation(i));
            }
        }
        Ok(())
    }

    /// Original ids of every landmark the keyframes refer to.
    pub fn landmark_ids(&self) -> BTreeSet<&str> {
        self.keyframes
            .iter()
            .filter_map(|k| k.frame.landmark())
            .map(|d| d.original_id.as_str())
            .collect()
    }
}

/// Origin of a landmark's frame: the top-face center of an object or the
/// table point of a position, with identity orientation.
pub fn landmark_origin(scene: &Scene, id: &str) -> Option<Pose> {
    if let Some(o) = scene.object(id) {
        return Some(Pose::at(o.top_center()));
    }
    scene.position(id).map(|p| Pose::at(p.point()))
}

/// Point used to measure how close a pose is to a landmark: the bounding-box
/// center of an object or the table point of a position.
pub fn landmark_anchor(scene: &Scene, id: &str) -> Option<Vec3> {
    if let Some(o) = scene.object(id) {
        return Some(o.center());
    }
    scene.position(id).map(|p| p.point())
}

pub fn describe_landmark(scene: &Scene, id: &str) -> Option<LandmarkDescriptor> {
    if let Some(o) = scene.object(id) {
        return Some(LandmarkDescriptor { ty: o.ty.clone(), dims: o.dims, original_id: id.to_string() });
    }
    scene
        .position(id)
        .map(|_| LandmarkDescriptor { ty: TypeTag::position(), dims: Dims::ZERO, original_id: id.to_string() })
}

/// The nearest landmark whose anchor lies within `r_frame` of `point`, or
/// `None`. Ties go to the smallest id.
pub fn nearest_landmark<'a>(scene: &'a Scene, point: &Vec3, r_frame: f64, exclude: &BTreeSet<String>) -> Option<&'a str> {
    scene
        .element_ids()
        .filter(|id| !exclude.contains(*id))
        .filter_map(|id| landmark_anchor(scene, id).map(|a| (id, a.distance(point))))
        .filter(|(_, d)| *d <= r_frame)
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)))
        .map(|(id, _)| id)
}
