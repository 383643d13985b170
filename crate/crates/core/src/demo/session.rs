use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::keyframe::{describe_landmark, landmark_origin, nearest_landmark, FrameRef, GripperCommand, Keyframe, LowLevelAction};
use super::pose::Pose;
use super::sim::{SimSettings, Simulator};
use super::DemoError;
use crate::world::{perceive, Arm, PerceptionMode, PerceptionParams, Scene, WorldState};

/// A recorded keyframe together with the world pose and the scene it was
/// recorded in, so its frame can be reassigned later.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedKeyframe {
    pub keyframe: Keyframe,
    pub world_pose: Pose,
    pub scene: Scene,
}

/// An in-progress demonstration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSession {
    pub scene_before: Scene,
    pub o1: WorldState,
    pub recorded: Vec<RecordedKeyframe>,
    /// The scene as the demonstration has changed it so far.
    pub sim: Simulator,
}

/// Everything a finished demonstration yields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoResult {
    pub action: LowLevelAction,
    pub o1: WorldState,
    pub o2: WorldState,
    pub scene_before: Scene,
    pub scene_after: Scene,
}

pub fn begin_demo(scene: &Scene, params: &PerceptionParams, settings: SimSettings) -> DemoSession {
    DemoSession {
        scene_before: scene.clone(),
        o1: perceive(scene, params, PerceptionMode::Full),
        recorded: Vec::new(),
        sim: Simulator::new(scene.clone(), settings),
    }
}

impl DemoSession {
    pub fn live(&self) -> &Scene {
        &self.sim.scene
    }

    pub fn settings(&self) -> &SimSettings {
        &self.sim.settings
    }

    pub fn keyframes(&self) -> Vec<Keyframe> {
        self.recorded.iter().map(|r| r.keyframe.clone()).collect()
    }

    /// Records a world pose, attaching it to the nearest landmark within
    /// `r_frame` (held objects and what rides on them excluded), and moves the
    /// simulated arm there.
    pub fn record_keyframe(&mut self, arm: Arm, world_pose: Pose, gripper: GripperCommand) -> Result<&Keyframe, DemoError> {
        if !self.sim.settings.workspace.contains(&world_pose.position) {
            return Err(DemoError::OutOfWorkspace(world_pose.position));
        }
        if !world_pose.is_normalized() {
            return Err(DemoError::InvalidOrientation(self.recorded.len()));
        }
        if let Some(first) = self.recorded.first() {
            if first.keyframe.arm != arm {
                return Err(DemoError::MixedArms(first.keyframe.arm, arm));
            }
        }
        let mut exclude: BTreeSet<String> = BTreeSet::new();
        for held in self.sim.scene.held.values() {
            exclude.insert(held.clone());
            exclude.extend(self.sim.scene.riders(held, self.sim.settings.epsilon));
        }
        let frame = match nearest_landmark(&self.sim.scene, &world_pose.position, self.sim.settings.r_frame, &exclude) {
            Some(id) => FrameRef::Landmark(describe_landmark(&self.sim.scene, id).expect("landmark exists")),
            None => FrameRef::Base,
        };
        let keyframe = Keyframe { arm, pose: express(&self.sim.scene, &frame, &world_pose), frame, gripper };
        let snapshot = self.sim.scene.clone();
        self.sim.step(arm, world_pose, gripper, false)?;
        self.recorded.push(RecordedKeyframe { keyframe, world_pose, scene: snapshot });
        Ok(&self.recorded.last().expect("just pushed").keyframe)
    }

    /// Re-attaches keyframe `index` to landmark `id`, or to the base frame.
    pub fn reassign_frame(&mut self, index: usize, landmark: Option<&str>) -> Result<(), DemoError> {
        let rec = self.recorded.get_mut(index).ok_or(DemoError::NoSuchKeyframe(index))?;
        let frame = match landmark {
            None => FrameRef::Base,
            Some(id) => FrameRef::Landmark(
                describe_landmark(&rec.scene, id).ok_or_else(|| DemoError::UnknownLandmark(id.to_string()))?,
            ),
        };
        rec.keyframe.pose = express(&rec.scene, &frame, &rec.world_pose);
        rec.keyframe.frame = frame;
        Ok(())
    }

    /// Ends the demonstration with the scene as the demonstration left it.
    pub fn finish(self, name: &str, params: &PerceptionParams) -> Result<DemoResult, DemoError> {
        let after = self.sim.scene.clone();
        self.finish_with(after, name, params)
    }

    /// Ends the demonstration with an externally observed final scene.
    pub fn finish_with(self, scene_after: Scene, name: &str, params: &PerceptionParams) -> Result<DemoResult, DemoError> {
        if self.recorded.is_empty() {
            return Err(DemoError::EmptyDemonstration);
        }
        let action = LowLevelAction { name: name.to_string(), keyframes: self.keyframes() };
        Ok(DemoResult {
            action,
            o2: perceive(&scene_after, params, PerceptionMode::Full),
            o1: self.o1,
            scene_before: self.scene_before,
            scene_after,
        })
    }
}

fn express(scene: &Scene, frame: &FrameRef, world: &Pose) -> Pose {
    match frame {
        FrameRef::Base => *world,
        FrameRef::Landmark(d) => world.relative_to(&landmark_origin(scene, &d.original_id).expect("landmark exists")),
    }
}
