//! The simulated tabletop: boxes on a table, marked positions, and what each
//! arm is holding.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{PrototypeTable, StackabilityRules};
use super::geometry::{BaseBox, Dims, Vec3};
use super::WorldError;
use crate::types::{TypeHierarchy, TypeTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    LeftClaw,
    RightSuction,
}

impl std::fmt::Display for Arm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Arm::LeftClaw => "left_claw",
            Arm::RightSuction => "right_suction",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub id: String,
    /// Center of the bounding-box base.
    pub pose: Vec3,
    pub dims: Dims,
    #[serde(rename = "type")]
    pub ty: TypeTag,
}

impl ObjectInstance {
    pub fn new(id: &str, pose: Vec3, dims: Dims, ty: TypeTag) -> Self {
        ObjectInstance { id: id.to_string(), pose, dims, ty }
    }

    pub fn bbox(&self) -> BaseBox {
        BaseBox { base: self.pose, dims: self.dims }
    }

    pub fn top(&self) -> f64 {
        self.pose.z + self.dims.height
    }

    /// Bounding-box center; grasps are measured against this point.
    pub fn center(&self) -> Vec3 {
        self.bbox().center()
    }

    /// Origin of the object's landmark frame: center of its top face.
    pub fn top_center(&self) -> Vec3 {
        Vec3::new(self.pose.x, self.pose.y, self.top())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionInstance {
    pub id: String,
    /// `[x, y]` on the table plane.
    pub pose: [f64; 2],
}

impl PositionInstance {
    pub fn new(id: &str, x: f64, y: f64) -> Self {
        PositionInstance { id: id.to_string(), pose: [x, y] }
    }

    pub fn point(&self) -> Vec3 {
        Vec3::new(self.pose[0], self.pose[1], 0.0)
    }
}

/// Where to put a new object in [`Scene::place`].
#[derive(Debug, Clone, Copy)]
pub enum Support<'a> {
    Position(&'a str),
    Object(&'a str),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scene {
    pub objects: Vec<ObjectInstance>,
    pub positions: Vec<PositionInstance>,
    #[serde(default)]
    pub held: BTreeMap<Arm, String>,
}

/// Four marked positions A-D in a row in front of the robot, 0.2 m apart.
pub fn table_positions() -> Vec<PositionInstance> {
    ["A", "B", "C", "D"]
        .iter()
        .enumerate()
        .map(|(i, id)| PositionInstance::new(id, 0.5, -0.3 + 0.2 * i as f64))
        .collect()
}

impl Scene {
    pub fn new(positions: Vec<PositionInstance>) -> Self {
        let mut s = Scene { objects: Vec::new(), positions, held: BTreeMap::new() };
        s.positions.sort_by(|a, b| a.id.cmp(&b.id));
        s
    }

    pub fn tabletop() -> Self {
        Scene::new(table_positions())
    }

    pub fn object(&self, id: &str) -> Option<&ObjectInstance> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_mut(&mut self, id: &str) -> Option<&mut ObjectInstance> {
        self.objects.iter_mut().find(|o| o.id == id)
    }

    pub fn position(&self, id: &str) -> Option<&PositionInstance> {
        self.positions.iter().find(|p| p.id == id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.object(id).is_some() || self.position(id).is_some()
    }

    pub fn holder(&self, id: &str) -> Option<Arm> {
        self.held.iter().find(|(_, o)| o.as_str() == id).map(|(a, _)| *a)
    }

    pub fn is_held(&self, id: &str) -> bool {
        self.holder(id).is_some()
    }

    pub fn held_by(&self, arm: Arm) -> Option<&str> {
        self.held.get(&arm).map(String::as_str)
    }

    /// Adds an object, keeping objects sorted by id.
    pub fn insert(&mut self, obj: ObjectInstance) -> Result<(), WorldError> {
        if self.contains(&obj.id) {
            return Err(WorldError::DuplicateId(obj.id));
        }
        let at = self.objects.partition_point(|o| o.id < obj.id);
        self.objects.insert(at, obj);
        Ok(())
    }

    /// Adds an object resting centered on a position or on top of another object.
    pub fn place(&mut self, id: &str, dims: Dims, ty: TypeTag, on: Support<'_>) -> Result<(), WorldError> {
        let pose = match on {
            Support::Position(p) => {
                self.position(p).ok_or_else(|| WorldError::UnknownInstance(p.to_string()))?.point()
            }
            Support::Object(o) => {
                self.object(o).ok_or_else(|| WorldError::UnknownInstance(o.to_string()))?.top_center()
            }
        };
        self.insert(ObjectInstance::new(id, pose, dims, ty))
    }

    /// Ids of every object and position.
    pub fn element_ids(&self) -> impl Iterator<Item = &str> {
        self.objects.iter().map(|o| o.id.as_str()).chain(self.positions.iter().map(|p| p.id.as_str()))
    }

    /// Type of every instance; positions are POSITION.
    pub fn instance_types(&self) -> BTreeMap<String, TypeTag> {
        self.objects
            .iter()
            .map(|o| (o.id.clone(), o.ty.clone()))
            .chain(self.positions.iter().map(|p| (p.id.clone(), TypeTag::position())))
            .collect()
    }

    /// The object `id` sits on, if it rests on another object's top face.
    pub fn resting_on(&self, id: &str, eps: f64) -> Option<&ObjectInstance> {
        let obj = self.object(id)?;
        self.objects
            .iter()
            .filter(|o| o.id != id && (obj.pose.z - o.top()).abs() <= eps && o.bbox().footprint_overlaps(&obj.bbox(), 1e-9))
            .min_by(|a, b| {
                a.pose
                    .horizontal_distance(&obj.pose)
                    .total_cmp(&b.pose.horizontal_distance(&obj.pose))
                    .then_with(|| a.id.cmp(&b.id))
            })
    }

    /// Objects resting, directly or transitively, on `id`.
    pub fn riders(&self, id: &str, eps: f64) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![id.to_string()];
        while let Some(cur) = frontier.pop() {
            for o in &self.objects {
                if o.id != id
                    && !out.contains(&o.id)
                    && !self.is_held(&o.id)
                    && self.resting_on(&o.id, eps).map(|s| s.id.as_str()) == Some(cur.as_str())
                {
                    out.insert(o.id.clone());
                    frontier.push(o.id.clone());
                }
            }
        }
        out
    }

    /// Checks ids, dims, types, attachments, support and non-overlap.
    pub fn validate(&self, types: &TypeHierarchy, eps: f64) -> Result<(), WorldError> {
        let mut ids = BTreeSet::new();
        for id in self.element_ids() {
            if !ids.insert(id) {
                return Err(WorldError::DuplicateId(id.to_string()));
            }
        }
        for o in &self.objects {
            if !o.dims.is_positive() {
                return Err(WorldError::InvalidScene(format!("object `{}` has non-positive dims", o.id)));
            }
            if !types.is_subtype(&o.ty, &TypeTag::object()) {
                return Err(WorldError::InvalidScene(format!(
                    "object `{}` has type `{}` which is not an OBJECT",
                    o.id, o.ty
                )));
            }
        }
        let mut holders = BTreeSet::new();
        for (arm, id) in &self.held {
            if self.object(id).is_none() {
                return Err(WorldError::InvalidScene(format!("{arm} holds unknown object `{id}`")));
            }
            if !holders.insert(id) {
                return Err(WorldError::InvalidScene(format!("`{id}` is held by two arms")));
            }
        }
        for o in self.objects.iter().filter(|o| !self.is_held(&o.id)) {
            let on_table = o.pose.z.abs() <= eps;
            if !on_table && self.resting_on(&o.id, eps).is_none() {
                return Err(WorldError::InvalidScene(format!("object `{}` is floating", o.id)));
            }
        }
        let free: Vec<&ObjectInstance> = self.objects.iter().filter(|o| !self.is_held(&o.id)).collect();
        for (i, a) in free.iter().enumerate() {
            for b in &free[i + 1..] {
                if a.bbox().intersects(&b.bbox(), 1e-6) {
                    return Err(WorldError::InvalidScene(format!("objects `{}` and `{}` overlap", a.id, b.id)));
                }
            }
        }
        Ok(())
    }

    /// A reproducible random arrangement of `n` objects on the standard
    /// positions. Stacks only form where `rules` allow the pairing.
    pub fn random(seed: u64, n: usize, prototypes: &PrototypeTable, rules: &StackabilityRules, types: &TypeHierarchy) -> Scene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut scene = Scene::tabletop();
        let mut tops: BTreeMap<String, Option<String>> =
            scene.positions.iter().map(|p| (p.id.clone(), None)).collect();
        let mut counters: BTreeMap<TypeTag, usize> = BTreeMap::new();
        for _ in 0..n {
            let proto = &prototypes.prototypes[rng.random_range(0..prototypes.prototypes.len())];
            let k = counters.entry(proto.ty.clone()).or_default();
            *k += 1;
            let id = format!("{}{}", proto.ty, k);
            let mut order: Vec<String> = tops.keys().cloned().collect();
            order.shuffle(&mut rng);
            for pos in order {
                let top = tops[&pos].clone();
                let target_ty = match &top {
                    None => TypeTag::position(),
                    Some(o) => scene.object(o).expect("top exists").ty.clone(),
                };
                if !rules.allows(types, &proto.ty, &target_ty) {
                    continue;
                }
                let support = match &top {
                    None => Support::Position(&pos),
                    Some(o) => Support::Object(o),
                };
                scene.place(&id, proto.dims, proto.ty.clone(), support).expect("fresh id");
                tops.insert(pos, Some(id.clone()));
                break;
            }
        }
        scene
    }
}
