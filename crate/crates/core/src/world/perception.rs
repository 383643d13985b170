//! Symbolic perception: turning a geometric scene into ground atoms, and
//! applying user corrections to the result.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::config::{IrpConfig, StackabilityRules};
use super::scene::{ObjectInstance, Scene};
use super::state::{Correction, WorldState};
use super::WorldError;
use crate::logic::{builtin_predicates, check_atom, Atom, CLEAR, FLAT, ON, STACKABLE, THIN};
use crate::types::{TypeHierarchy, TypeTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerceptionMode {
    #[default]
    Full,
    /// Objects with something stacked on them are invisible.
    StackBlind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionParams {
    pub d: f64,
    pub epsilon: f64,
    pub rules: StackabilityRules,
    pub types: TypeHierarchy,
}

impl Default for PerceptionParams {
    fn default() -> Self {
        PerceptionParams::from_config(&IrpConfig::default(), TypeHierarchy::builtin())
    }
}

impl PerceptionParams {
    pub fn from_config(cfg: &IrpConfig, types: TypeHierarchy) -> Self {
        PerceptionParams {
            d: cfg.thresholds.d,
            epsilon: cfg.thresholds.epsilon,
            rules: cfg.stackable.clone(),
            types,
        }
    }
}

/// The element `obj` is on: the nearest position when resting on the table,
/// otherwise the nearest object whose top face it sits on. Ties go to the
/// smallest id.
fn support_of<'a>(scene: &'a Scene, obj: &ObjectInstance, params: &PerceptionParams) -> Option<&'a str> {
    let nearest = |cands: Vec<(&'a str, f64)>| {
        cands
            .into_iter()
            .filter(|(_, dist)| *dist <= params.d + 1e-12)
            .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)))
            .map(|(id, _)| id)
    };
    if obj.pose.z.abs() <= params.epsilon {
        nearest(
            scene
                .positions
                .iter()
                .map(|p| (p.id.as_str(), p.point().horizontal_distance(&obj.pose)))
                .collect(),
        )
    } else {
        nearest(
            scene
                .objects
                .iter()
                .filter(|o| o.id != obj.id && !scene.is_held(&o.id) && (obj.pose.z - o.top()).abs() <= params.epsilon)
                .map(|o| (o.id.as_str(), o.pose.horizontal_distance(&obj.pose)))
                .collect(),
        )
    }
}

/// Type-derived atoms: flat, thin and stackable over `instances`.
pub fn static_atoms(instances: &BTreeMap<String, TypeTag>, params: &PerceptionParams) -> BTreeSet<Atom> {
    let t = &params.types;
    let mut out = BTreeSet::new();
    for (id, ty) in instances {
        if !t.is_subtype(ty, &TypeTag::object()) {
            continue;
        }
        if t.is_subtype(ty, &TypeTag::base()) || t.is_subtype(ty, &TypeTag::cube()) {
            out.insert(Atom::flat(id));
        }
        if t.is_subtype(ty, &TypeTag::cube()) || t.is_subtype(ty, &TypeTag::roof()) {
            out.insert(Atom::thin(id));
        }
        for (e, ety) in instances {
            if e != id && params.rules.allows(t, ty, ety) {
                out.insert(Atom::stackable(id, e));
            }
        }
    }
    out
}

/// Observes the scene. See [`PerceptionMode`] for the stack-blind variant.
pub fn perceive(scene: &Scene, params: &PerceptionParams, mode: PerceptionMode) -> WorldState {
    let mut on = BTreeSet::new();
    for o in scene.objects.iter().filter(|o| !scene.is_held(&o.id)) {
        if let Some(s) = support_of(scene, o, params) {
            on.insert(Atom::on(&o.id, s));
        }
    }
    let mut instances = scene.instance_types();
    if mode == PerceptionMode::StackBlind {
        let hidden: BTreeSet<String> = on
            .iter()
            .map(|a| a.args[1].clone())
            .filter(|e| scene.object(e).is_some())
            .collect();
        instances.retain(|id, _| !hidden.contains(id));
        on.retain(|a| a.args.iter().all(|x| !hidden.contains(x)));
    }
    let held: BTreeSet<String> = scene.held.values().filter(|h| instances.contains_key(*h)).cloned().collect();
    let mut state = WorldState { atoms: on, instances, held };
    state.recompute_clear();
    let statics = static_atoms(&state.instances, params);
    state.atoms.extend(statics);
    state
}

/// Applies user corrections to a perceived state.
///
/// Retypes and instances first mentioned by a correction (looked up in
/// `scene`) are applied first, then type-derived atoms are recomputed, then
/// retractions and assertions. Asserting `on(x, e)` makes `e` not clear and
/// moves `x` off whatever it was perceived on; retracting the last `on(_, e)`
/// makes `e` clear.
pub fn apply_corrections(
    state: &WorldState,
    scene: &Scene,
    params: &PerceptionParams,
    corrections: &[Correction],
) -> Result<WorldState, WorldError> {
    let mut next = state.clone();
    let reveal = |next: &mut WorldState, id: &str| -> Result<(), WorldError> {
        if next.instances.contains_key(id) {
            return Ok(());
        }
        let ty = scene.instance_types().remove(id).ok_or_else(|| WorldError::UnknownInstance(id.to_string()))?;
        next.instances.insert(id.to_string(), ty);
        Ok(())
    };
    for c in corrections {
        match c {
            Correction::Retype { id, ty } => {
                reveal(&mut next, id)?;
                if !params.types.is_subtype(ty, &TypeTag::object()) {
                    return Err(WorldError::TypeViolation(format!("`{ty}` is not an object type")));
                }
                if !params.types.is_subtype(&next.instances[id], &TypeTag::object()) {
                    return Err(WorldError::TypeViolation(format!("`{id}` is not an object")));
                }
                next.instances.insert(id.clone(), ty.clone());
            }
            Correction::Assert(a) | Correction::Retract(a) => {
                for arg in &a.args {
                    reveal(&mut next, arg)?;
                }
            }
        }
    }
    next.atoms.retain(|a| ![FLAT, THIN, STACKABLE].contains(&a.predicate.as_str()));
    let statics = static_atoms(&next.instances, params);
    next.atoms.extend(statics);

    let predicates = builtin_predicates();
    let asserted: Vec<&Atom> = corrections
        .iter()
        .filter_map(|c| match c {
            Correction::Assert(a) => Some(a),
            _ => None,
        })
        .collect();
    for a in &asserted {
        if predicates.iter().any(|p| p.name == a.predicate) {
            check_atom(a, &predicates, &params.types, |x| next.instances.get(x))
                .map_err(|e| WorldError::TypeViolation(e.to_string()))?;
        }
    }
    let mut explicit_on: BTreeMap<&str, &str> = BTreeMap::new();
    for a in asserted.iter().filter(|a| a.predicate == ON) {
        if let Some(prev) = explicit_on.insert(&a.args[0], &a.args[1]) {
            if prev != a.args[1] {
                return Err(WorldError::InconsistentCorrection(format!(
                    "{} cannot be on both {prev} and {}",
                    a.args[0], a.args[1]
                )));
            }
        }
    }
    for a in asserted.iter().filter(|a| a.predicate == CLEAR) {
        if let Some((o, _)) = explicit_on.iter().find(|(_, e)| **e == a.args[0]) {
            return Err(WorldError::InconsistentCorrection(format!(
                "{} is asserted clear while {o} is asserted on it",
                a.args[0]
            )));
        }
    }

    let mut touched_under: BTreeSet<String> = BTreeSet::new();
    for c in corrections {
        if let Correction::Retract(a) = c {
            next.atoms.remove(a);
            if a.predicate == ON {
                touched_under.insert(a.args[1].clone());
            }
        }
    }
    for a in &asserted {
        if a.predicate == ON {
            let displaced: Vec<Atom> = next
                .atoms
                .iter()
                .filter(|b| b.predicate == ON && b.args[0] == a.args[0] && b.args[1] != a.args[1])
                .cloned()
                .collect();
            for b in displaced {
                touched_under.insert(b.args[1].clone());
                next.atoms.remove(&b);
            }
            next.atoms.remove(&Atom::clear(&a.args[1]));
            next.held.remove(&a.args[0]);
        }
        next.atoms.insert((*a).clone());
    }
    let uncovered = next.uncovered();
    touched_under.extend(next.instances.keys().filter(|id| !state.instances.contains_key(*id)).cloned());
    for e in touched_under {
        if uncovered.contains(&e) {
            next.atoms.insert(Atom::clear(&e));
        }
    }
    let violations = next.coupling_violations();
    if !violations.is_empty() {
        return Err(WorldError::InconsistentCorrection(violations.join("; ")));
    }
    Ok(next)
}
