//! Action inference from a single before/after observation pair, lifting to
//! typed parameters, and user edits.

pub mod edit;
pub mod english;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demo::{DemoResult, LowLevelAction};
use crate::logic::{is_variable, ActionSchema, Atom, Literal, Parameter, PredicateSchema, SchemaError};
use crate::types::{TypeHierarchy, TypeTag};
use crate::world::WorldState;

pub use edit::{edit_action, ActionEdit};
pub use english::{render_action, render_atom, render_literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("observations are over different instances (only before: {only_before:?}, only after: {only_after:?})")]
    InstanceMismatch { only_before: Vec<String>, only_after: Vec<String> },
    #[error("instance `{0}` has no type")]
    UntypedInstance(String),
    #[error("type violation: {0}")]
    TypeViolation(String),
    #[error("`{0}` would be both added and deleted")]
    EffectConflict(Atom),
    #[error("`{0}` would be required both true and false")]
    ContradictoryPrecondition(Atom),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("removing this leaves `{0}` unused, but a keyframe frame depends on it")]
    DanglingVariable(String),
    #[error("`{0}` is not part of the action")]
    NotFound(String),
    #[error("an action named `{0}` already exists")]
    DuplicateName(String),
    #[error("no action named `{0}`")]
    UnknownAction(String),
    #[error("invalid action name `{0}`")]
    InvalidName(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

/// Ground preconditions and effects inferred from one demonstration.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroundConditions {
    pub pre: BTreeSet<Literal>,
    pub eff_plus: BTreeSet<Atom>,
    pub eff_minus: BTreeSet<Atom>,
}

/// `eff⁻ = O1 ∖ O2`, `eff⁺ = O2 ∖ O1`, and the precondition requires every
/// deleted atom and the absence of every added one.
pub fn infer_ground_conditions(o1: &WorldState, o2: &WorldState) -> Result<GroundConditions, InferenceError> {
    if o1.instances != o2.instances {
        let only = |a: &WorldState, b: &WorldState| {
            a.instances
                .iter()
                .filter(|(k, v)| b.instances.get(*k) != Some(*v))
                .map(|(k, _)| k.clone())
                .collect::<Vec<_>>()
        };
        return Err(InferenceError::InstanceMismatch { only_before: only(o1, o2), only_after: only(o2, o1) });
    }
    let eff_minus: BTreeSet<Atom> = o1.atoms.difference(&o2.atoms).cloned().collect();
    let eff_plus: BTreeSet<Atom> = o2.atoms.difference(&o1.atoms).cloned().collect();
    let pre = eff_minus
        .iter()
        .map(|a| Literal::pos(a.clone()))
        .chain(eff_plus.iter().map(|a| Literal::neg(a.clone())))
        .collect();
    Ok(GroundConditions { pre, eff_plus, eff_minus })
}

/// Where a lifted parameter came from in the demonstration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamOrigin {
    /// Demo-time instance id.
    pub instance: String,
    /// True when a keyframe frame is attached to that instance, so the
    /// parameter decides where the arm goes.
    pub anchored: bool,
}

/// A lifted, typed action linked to the keyframes that perform it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighLevelAction {
    pub name: String,
    pub params: Vec<Parameter>,
    pub pre: BTreeSet<Literal>,
    pub eff_plus: BTreeSet<Atom>,
    pub eff_minus: BTreeSet<Atom>,
    /// Name of the linked low-level action.
    pub low_level: String,
    #[serde(default)]
    pub origins: BTreeMap<String, ParamOrigin>,
}

impl HighLevelAction {
    pub fn from_schema(schema: ActionSchema, low_level: &str) -> Self {
        HighLevelAction {
            name: schema.name,
            params: schema.params,
            pre: schema.pre,
            eff_plus: schema.add,
            eff_minus: schema.del,
            low_level: low_level.to_string(),
            origins: BTreeMap::new(),
        }
    }

    pub fn schema(&self) -> ActionSchema {
        ActionSchema {
            name: self.name.clone(),
            params: self.params.clone(),
            pre: self.pre.clone(),
            add: self.eff_plus.clone(),
            del: self.eff_minus.clone(),
        }
    }

    pub fn param(&self, name: &str) -> Option<&Parameter> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Checks the action invariants, including that every parameter is used.
    pub fn validate(&self, predicates: &[PredicateSchema], types: &TypeHierarchy) -> Result<(), InferenceError> {
        self.schema().validate(predicates, types, true).map_err(InferenceError::from)
    }

    /// Substitution mapping each parameter to the matching argument.
    pub fn substitution(&self, args: &[String]) -> BTreeMap<String, String> {
        self.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()).collect()
    }

    pub fn ground(&self, args: &[String]) -> GroundConditions {
        let s = self.substitution(args);
        GroundConditions {
            pre: self.pre.iter().map(|l| l.substitute(&s)).collect(),
            eff_plus: self.eff_plus.iter().map(|a| a.substitute(&s)).collect(),
            eff_minus: self.eff_minus.iter().map(|a| a.substitute(&s)).collect(),
        }
    }

    /// Landmark bindings for executing the action with `args`: each
    /// parameter's demo-time instance maps to the argument bound to it.
    pub fn landmark_bindings(&self, args: &[String]) -> BTreeMap<String, String> {
        self.params
            .iter()
            .zip(args)
            .filter_map(|(p, a)| self.origins.get(&p.name).map(|o| (o.instance.clone(), a.clone())))
            .collect()
    }
}

/// Sort key placing binary relations before unary properties so that an
/// object is named before the places it relates to.
fn scan_order(atoms: &mut [&Atom]) {
    atoms.sort_by(|a, b| b.args.len().cmp(&a.args.len()).then_with(|| a.cmp(b)));
}

fn letter_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        format!("?{letter}")
    } else {
        format!("?{letter}{}", i / 26 + 1)
    }
}

/// Replaces instances with typed variables.
///
/// Instances are named in order of first appearance, scanning positive
/// preconditions, negative preconditions, added and deleted atoms (relations
/// before properties within each group). Objects become `?obj`, `?obj2`, ...,
/// positions `?A`, `?B`, ..., anything else `?e`, `?e2`, .... Each variable
/// takes the instance's observed type.
pub fn lift_action(
    name: &str,
    ground: &GroundConditions,
    instances: &BTreeMap<String, TypeTag>,
    types: &TypeHierarchy,
    low_level: &LowLevelAction,
) -> Result<HighLevelAction, InferenceError> {
    let mut groups: Vec<Vec<&Atom>> = vec![
        ground.pre.iter().filter(|l| l.positive).map(|l| &l.atom).collect(),
        ground.pre.iter().filter(|l| !l.positive).map(|l| &l.atom).collect(),
        ground.eff_plus.iter().collect(),
        ground.eff_minus.iter().collect(),
    ];
    let mut order: Vec<&str> = Vec::new();
    for g in &mut groups {
        scan_order(g);
        for a in g.iter() {
            for arg in &a.args {
                if !order.contains(&arg.as_str()) {
                    order.push(arg);
                }
            }
        }
    }
    let anchors = low_level.landmark_ids();
    let (mut objects, mut positions, mut others) = (0usize, 0usize, 0usize);
    let mut map = BTreeMap::new();
    let mut params = Vec::new();
    let mut origins = BTreeMap::new();
    for inst in order {
        if is_variable(inst) {
            return Err(InferenceError::UntypedInstance(inst.to_string()));
        }
        let ty = instances.get(inst).ok_or_else(|| InferenceError::UntypedInstance(inst.to_string()))?;
        let var = if types.is_subtype(ty, &TypeTag::object()) {
            objects += 1;
            if objects == 1 { "?obj".to_string() } else { format!("?obj{objects}") }
        } else if types.is_subtype(ty, &TypeTag::position()) {
            positions += 1;
            letter_name(positions - 1)
        } else {
            others += 1;
            if others == 1 { "?e".to_string() } else { format!("?e{others}") }
        };
        map.insert(inst.to_string(), var.clone());
        params.push(Parameter::new(&var, ty.clone()));
        origins.insert(var, ParamOrigin { instance: inst.to_string(), anchored: anchors.contains(inst) });
    }
    Ok(HighLevelAction {
        name: name.to_string(),
        params,
        pre: ground.pre.iter().map(|l| l.substitute(&map)).collect(),
        eff_plus: ground.eff_plus.iter().map(|a| a.substitute(&map)).collect(),
        eff_minus: ground.eff_minus.iter().map(|a| a.substitute(&map)).collect(),
        low_level: low_level.name.clone(),
        origins,
    })
}

/// Infers and lifts the high-level action shown by a finished
/// demonstration, named `name` and linked to the demo's low-level action.
pub fn action_from_demo(name: &str, demo: &DemoResult, types: &TypeHierarchy) -> Result<HighLevelAction, InferenceError> {
    let ground = infer_ground_conditions(&demo.o1, &demo.o2)?;
    lift_action(name, &ground, &demo.o1.instances, types, &demo.action)
}
