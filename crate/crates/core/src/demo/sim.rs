//! Purely kinematic simulation of the two grippers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::keyframe::{landmark_origin, FrameRef, GripperCommand, LowLevelAction};
use super::pose::Pose;
use super::DemoError;
use crate::world::{Arm, IrpConfig, Scene, Vec3};

/// Axis-aligned box the grippers may reach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub min: Vec3,
    pub max: Vec3,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace { min: Vec3::new(0.0, -0.8, 0.0), max: Vec3::new(1.2, 0.8, 0.8) }
    }
}

impl Workspace {
    pub fn contains(&self, p: &Vec3) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSettings {
    pub r_frame: f64,
    pub grasp_radius: f64,
    pub epsilon: f64,
    pub workspace: Workspace,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings::from_config(&IrpConfig::default())
    }
}

impl SimSettings {
    pub fn from_config(cfg: &IrpConfig) -> Self {
        SimSettings {
            r_frame: cfg.thresholds.r_frame,
            grasp_radius: cfg.thresholds.grasp_radius,
            epsilon: cfg.thresholds.epsilon,
            workspace: Workspace::default(),
        }
    }
}

/// A keyframe with its frame resolved to a world pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorldKeyframe {
    pub arm: Arm,
    pub pose: Pose,
    pub gripper: GripperCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Grip {
    object: String,
    offset: Vec3,
    riders: BTreeSet<String>,
}

/// A scene plus what the grippers are doing to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Simulator {
    pub scene: Scene,
    pub settings: SimSettings,
    grips: BTreeMap<Arm, Grip>,
    gripper_poses: BTreeMap<Arm, Pose>,
}

impl Simulator {
    pub fn new(scene: Scene, settings: SimSettings) -> Self {
        Simulator { scene, settings, grips: BTreeMap::new(), gripper_poses: BTreeMap::new() }
    }

    pub fn gripper_pose(&self, arm: Arm) -> Option<Pose> {
        self.gripper_poses.get(&arm).copied()
    }

    /// Objects carried along when `arm` moves: the held object and its riders.
    pub fn carried(&self, arm: Arm) -> BTreeSet<String> {
        match self.grips.get(&arm) {
            Some(g) => g.riders.iter().cloned().chain([g.object.clone()]).collect(),
            None => BTreeSet::new(),
        }
    }

    fn shift(&mut self, ids: &BTreeSet<String>, delta: Vec3) {
        for o in self.scene.objects.iter_mut().filter(|o| ids.contains(&o.id)) {
            o.pose = o.pose + delta;
        }
    }

    /// Moves `arm` to `pose` and then applies `gripper`. With `strict`, a
    /// close that finds nothing to grasp is an error; otherwise the gripper
    /// just closes on air.
    pub fn step(&mut self, arm: Arm, pose: Pose, gripper: GripperCommand, strict: bool) -> Result<(), DemoError> {
        if !self.settings.workspace.contains(&pose.position) {
            return Err(DemoError::OutOfWorkspace(pose.position));
        }
        self.move_to(arm, pose);
        match gripper {
            GripperCommand::Close => {
                let holding = self.grips.contains_key(&arm) || self.scene.held.contains_key(&arm);
                if !holding {
                    match self.grasp_candidate(&pose.position) {
                        Some(id) => self.attach(arm, &id, &pose.position),
                        None if strict => return Err(DemoError::GraspFailed(pose.position)),
                        None => {}
                    }
                }
            }
            GripperCommand::Open => self.release(arm),
        }
        Ok(())
    }

    fn move_to(&mut self, arm: Arm, pose: Pose) {
        if let Some(held) = self.scene.held.get(&arm).cloned() {
            if !self.grips.contains_key(&arm) {
                let obj = self.scene.object(&held).expect("held object exists");
                let offset = obj.pose - pose.position;
                self.grips.insert(arm, Grip { object: held, offset, riders: BTreeSet::new() });
            }
            let grip = &self.grips[&arm];
            let target = pose.position + grip.offset;
            let current = self.scene.object(&grip.object).expect("held object exists").pose;
            let carried = self.carried(arm);
            self.shift(&carried, target - current);
        }
        self.gripper_poses.insert(arm, pose);
    }

    fn grasp_candidate(&self, at: &Vec3) -> Option<String> {
        self.scene
            .objects
            .iter()
            .filter(|o| !self.scene.is_held(&o.id))
            .map(|o| (o, o.center().distance(at)))
            .filter(|(_, d)| *d <= self.settings.grasp_radius)
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.id.cmp(&b.0.id)))
            .map(|(o, _)| o.id.clone())
    }

    fn attach(&mut self, arm: Arm, id: &str, at: &Vec3) {
        let riders = self.scene.riders(id, self.settings.epsilon);
        let offset = self.scene.object(id).expect("candidate exists").pose - *at;
        self.scene.held.insert(arm, id.to_string());
        self.grips.insert(arm, Grip { object: id.to_string(), offset, riders });
    }

    fn release(&mut self, arm: Arm) {
        let Some(id) = self.scene.held.remove(&arm) else {
            self.grips.remove(&arm);
            return;
        };
        let carried: BTreeSet<String> =
            self.grips.remove(&arm).map(|g| g.riders).unwrap_or_default().into_iter().chain([id.clone()]).collect();
        let obj = self.scene.object(&id).expect("held object exists").clone();
        let eps = self.settings.epsilon;
        let support = self
            .scene
            .objects
            .iter()
            .filter(|o| !carried.contains(&o.id) && !self.scene.is_held(&o.id))
            .filter(|o| o.bbox().footprint_overlaps(&obj.bbox(), 1e-9) && o.top() <= obj.pose.z + eps)
            .map(|o| o.top())
            .fold(0.0f64, f64::max);
        self.shift(&carried, Vec3::new(0.0, 0.0, support - obj.pose.z));
    }
}

/// Resolves every keyframe to a world pose. Landmark frames use `bindings`
/// for their original id when present, otherwise the scene instance of the
/// same type with the closest dims. Among equally close candidates one still
/// carrying the original id wins, then the smallest id.
pub fn resolve_keyframes(
    action: &LowLevelAction,
    scene: &Scene,
    bindings: &BTreeMap<String, String>,
) -> Result<Vec<WorldKeyframe>, DemoError> {
    let mut out = Vec::with_capacity(action.keyframes.len());
    for k in &action.keyframes {
        let world = match &k.frame {
            FrameRef::Base => k.pose,
            FrameRef::Landmark(d) => {
                let id = match bindings.get(&d.original_id) {
                    Some(id) => id.clone(),
                    None => scene
                        .instance_types()
                        .into_iter()
                        .filter(|(_, ty)| *ty == d.ty)
                        .map(|(id, _)| {
                            let dims = scene.object(&id).map(|o| o.dims).unwrap_or_default();
                            (dims.distance(&d.dims), id != d.original_id, id)
                        })
                        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| (a.1, &a.2).cmp(&(b.1, &b.2))))
                        .map(|(_, _, id)| id)
                        .ok_or_else(|| DemoError::UnresolvedLandmark(d.original_id.clone(), d.ty.clone()))?,
                };
                let origin = landmark_origin(scene, &id)
                    .ok_or_else(|| DemoError::UnresolvedLandmark(d.original_id.clone(), d.ty.clone()))?;
                k.pose.in_world(&origin)
            }
        };
        out.push(WorldKeyframe { arm: k.arm, pose: world, gripper: k.gripper });
    }
    Ok(out)
}

/// Replays resolved keyframes on `scene`.
pub fn replay(scene: &Scene, keyframes: &[WorldKeyframe], settings: &SimSettings) -> Result<Scene, DemoError> {
    let mut sim = Simulator::new(scene.clone(), *settings);
    for k in keyframes {
        sim.step(k.arm, k.pose, k.gripper, true)?;
    }
    Ok(sim.scene)
}

/// Resolves the action's landmarks against `scene` and replays it there.
pub fn execute_low_level(
    action: &LowLevelAction,
    scene: &Scene,
    bindings: &BTreeMap<String, String>,
    settings: &SimSettings,
) -> Result<Scene, DemoError> {
    action.validate()?;
    let resolved = resolve_keyframes(action, scene, bindings)?;
    replay(scene, &resolved, settings)
}
