use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::WorldError;
use crate::logic::{Atom, Literal, CLEAR, ON};
use crate::types::TypeTag;

/// A closed-world symbolic state: the atoms that hold over a set of typed
/// instances. Anything not in `atoms` is false.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WorldState {
    pub atoms: BTreeSet<Atom>,
    pub instances: BTreeMap<String, TypeTag>,
    /// Objects in a gripper. They take part in no `on`/`clear` atoms.
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub held: BTreeSet<String>,
}

/// Atoms that became true and atoms that became false between two states.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateDiff {
    pub added: BTreeSet<Atom>,
    pub removed: BTreeSet<Atom>,
}

/// A user edit to a perceived state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Correction {
    Assert(Atom),
    Retract(Atom),
    Retype { id: String, ty: TypeTag },
}

impl WorldState {
    pub fn new(instances: BTreeMap<String, TypeTag>, atoms: impl IntoIterator<Item = Atom>) -> Self {
        WorldState { atoms: atoms.into_iter().collect(), instances, held: BTreeSet::new() }
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn type_of(&self, id: &str) -> Option<&TypeTag> {
        self.instances.get(id)
    }

    pub fn satisfies<'a>(&self, lits: impl IntoIterator<Item = &'a Literal>) -> bool {
        lits.into_iter().all(|l| l.holds_in(&self.atoms))
    }

    /// Errors on the first atom argument that is not an instance.
    pub fn check_instances<'a>(&self, atoms: impl IntoIterator<Item = &'a Atom>) -> Result<(), WorldError> {
        for a in atoms {
            if let Some(arg) = a.args.iter().find(|x| !self.instances.contains_key(*x)) {
                return Err(WorldError::UnknownInstance(arg.clone()));
            }
        }
        Ok(())
    }

    /// `(atoms ∖ eff_minus) ∪ eff_plus`, with instances unchanged.
    pub fn apply_effects(&self, eff_plus: &BTreeSet<Atom>, eff_minus: &BTreeSet<Atom>) -> Result<WorldState, WorldError> {
        if let Some(a) = eff_plus.intersection(eff_minus).next() {
            return Err(WorldError::OverlappingEffects(a.clone()));
        }
        self.check_instances(eff_plus.iter().chain(eff_minus))?;
        let mut next = self.clone();
        for a in eff_minus {
            next.atoms.remove(a);
        }
        next.atoms.extend(eff_plus.iter().cloned());
        Ok(next)
    }

    pub fn diff(&self, after: &WorldState) -> StateDiff {
        StateDiff {
            added: after.atoms.difference(&self.atoms).cloned().collect(),
            removed: self.atoms.difference(&after.atoms).cloned().collect(),
        }
    }

    /// Elements that nothing sits on, skipping held objects.
    pub fn uncovered(&self) -> BTreeSet<String> {
        let covered: BTreeSet<&str> =
            self.atoms.iter().filter(|a| a.predicate == ON && a.args.len() == 2).map(|a| a.args[1].as_str()).collect();
        self.instances
            .keys()
            .filter(|id| !covered.contains(id.as_str()) && !self.held.contains(*id))
            .cloned()
            .collect()
    }

    /// Replaces every `clear` atom with the ones implied by `on`.
    pub fn recompute_clear(&mut self) {
        self.atoms.retain(|a| a.predicate != CLEAR);
        let clear: Vec<Atom> = self.uncovered().iter().map(|e| Atom::clear(e)).collect();
        self.atoms.extend(clear);
    }

    /// Human-readable descriptions of every breach of the rule "clear(e)
    /// holds iff nothing is on e", plus objects resting on two elements.
    pub fn coupling_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let uncovered = self.uncovered();
        for id in self.instances.keys() {
            if self.held.contains(id) {
                continue;
            }
            let clear = self.atoms.contains(&Atom::clear(id));
            let free = uncovered.contains(id);
            if clear && !free {
                out.push(format!("{id} is clear but something is on it"));
            } else if !clear && free {
                out.push(format!("nothing is on {id} but it is not clear"));
            }
        }
        let mut supports: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for a in self.atoms.iter().filter(|a| a.predicate == ON && a.args.len() == 2) {
            supports.entry(a.args[0].as_str()).or_default().push(a.args[1].as_str());
        }
        for (o, under) in supports {
            if under.len() > 1 {
                out.push(format!("{o} is on {}", under.join(" and ")));
            }
        }
        out
    }

    pub fn is_consistent(&self) -> bool {
        self.coupling_violations().is_empty()
    }
}
