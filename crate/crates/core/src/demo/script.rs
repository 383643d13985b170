//! Declarative demonstration files: a scene and a timed list of world
//! poses with gripper commands, replayed through a [`DemoSession`].

use serde::{Deserialize, Serialize};

use super::keyframe::GripperCommand;
use super::pose::Pose;
use super::session::{begin_demo, DemoResult};
use super::sim::SimSettings;
use super::DemoError;
use crate::world::{Arm, PerceptionParams, Scene, Vec3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptStep {
    /// Seconds from the start; only the order matters.
    pub t: f64,
    pub arm: Arm,
    pub pose: Pose,
    pub gripper: GripperCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoScript {
    pub name: String,
    pub scene: Scene,
    pub steps: Vec<ScriptStep>,
}

impl DemoScript {
    pub fn from_json(text: &str) -> Result<Self, DemoError> {
        serde_json::from_str(text).map_err(|e| DemoError::InvalidScript(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }

    pub fn run(&self, params: &PerceptionParams, settings: SimSettings) -> Result<DemoResult, DemoError> {
        if self.steps.windows(2).any(|w| w[1].t < w[0].t) {
            return Err(DemoError::InvalidScript("step times must not decrease".into()));
        }
        let mut session = begin_demo(&self.scene, params, settings);
        for s in &self.steps {
            session.record_keyframe(s.arm, s.pose, s.gripper)?;
        }
        session.finish(&self.name, params)
    }
}

/// How a pick-and-place demonstration takes hold of the object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspStyle {
    /// Claw from above.
    ClawTop,
    /// Claw from the side at half height, so a pile on top comes along.
    ClawSide,
    /// Suction cup on the top face.
    SuctionTop,
}

impl GraspStyle {
    pub fn arm(self) -> Arm {
        match self {
            GraspStyle::ClawTop | GraspStyle::ClawSide => Arm::LeftClaw,
            GraspStyle::SuctionTop => Arm::RightSuction,
        }
    }
}

/// Six keyframes moving `object` onto `target` (a position or an object):
/// approach, grasp, lift, carry, release, retreat.
pub fn pick_place_steps(scene: &Scene, object: &str, target: &str, style: GraspStyle) -> Result<Vec<ScriptStep>, DemoError> {
    let obj = scene.object(object).ok_or_else(|| DemoError::UnknownLandmark(object.to_string()))?;
    let (tx, ty, ttop) = match (scene.object(target), scene.position(target)) {
        (Some(o), _) => (o.pose.x, o.pose.y, o.top()),
        (None, Some(p)) => (p.pose[0], p.pose[1], 0.0),
        (None, None) => return Err(DemoError::UnknownLandmark(target.to_string())),
    };
    let h = obj.dims.height;
    let (x, y, z0) = (obj.pose.x, obj.pose.y, obj.pose.z);
    use GripperCommand::{Close, Open};
    let poses: Vec<(Vec3, GripperCommand)> = match style {
        GraspStyle::ClawTop | GraspStyle::SuctionTop => vec![
            (Vec3::new(x, y, z0 + h + 0.10), Open),
            (Vec3::new(x, y, z0 + h - 0.01), Close),
            (Vec3::new(x, y, z0 + h + 0.10), Close),
            (Vec3::new(tx, ty, ttop + h + 0.11), Close),
            (Vec3::new(tx, ty, ttop + h + 0.005), Open),
            (Vec3::new(tx, ty, ttop + h + 0.10), Open),
        ],
        GraspStyle::ClawSide => vec![
            (Vec3::new(x - 0.10, y, z0 + h / 2.0), Open),
            (Vec3::new(x - 0.02, y, z0 + h / 2.0), Close),
            (Vec3::new(x - 0.02, y, z0 + h / 2.0 + 0.10), Close),
            (Vec3::new(tx - 0.02, ty, ttop + h / 2.0 + 0.11), Close),
            (Vec3::new(tx - 0.02, ty, ttop + h / 2.0 + 0.005), Open),
            (Vec3::new(tx - 0.10, ty, ttop + h / 2.0 + 0.005), Open),
        ],
    };
    Ok(poses
        .into_iter()
        .enumerate()
        .map(|(i, (p, g))| ScriptStep { t: i as f64, arm: style.arm(), pose: Pose::at(p), gripper: g })
        .collect())
}

/// A complete script for one pick-and-place demonstration.
pub fn pick_place_script(name: &str, scene: &Scene, object: &str, target: &str, style: GraspStyle) -> Result<DemoScript, DemoError> {
    Ok(DemoScript {
        name: name.to_string(),
        scene: scene.clone(),
        steps: pick_place_steps(scene, object, target, style)?,
    })
}
