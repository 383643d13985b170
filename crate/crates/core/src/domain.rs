//! The taught planning domain: type hierarchy, predicates, high-level actions
//! and the low-level actions they execute with.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::demo::LowLevelAction;
use crate::inference::edit::is_valid_name;
use crate::inference::{edit_action, ActionEdit, HighLevelAction, InferenceError};
use crate::logic::{builtin_predicates, PredicateSchema};
use crate::pddl::{PddlDomain, REQUIREMENTS};
use crate::types::TypeHierarchy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub types: TypeHierarchy,
    pub predicates: Vec<PredicateSchema>,
    pub actions: BTreeMap<String, HighLevelAction>,
    /// Keyed by low-level action name. Several high-level actions may share
    /// one entry.
    pub low_level: BTreeMap<String, LowLevelAction>,
}

impl Domain {
    /// An empty domain over the built-in types and predicates.
    pub fn new(name: &str) -> Self {
        Domain {
            name: name.to_ascii_lowercase(),
            types: TypeHierarchy::builtin(),
            predicates: builtin_predicates(),
            actions: BTreeMap::new(),
            low_level: BTreeMap::new(),
        }
    }

    pub fn action(&self, name: &str) -> Result<&HighLevelAction, InferenceError> {
        self.actions.get(name).ok_or_else(|| InferenceError::UnknownAction(name.to_string()))
    }

    pub fn low_level_of(&self, action: &HighLevelAction) -> Option<&LowLevelAction> {
        self.low_level.get(&action.low_level)
    }

    /// Adds a validated action together with its low-level action. An
    /// existing low-level action of the same name is replaced.
    pub fn add_action(&mut self, action: HighLevelAction, low_level: Option<LowLevelAction>) -> Result<(), InferenceError> {
        if !is_valid_name(&action.name) {
            return Err(InferenceError::InvalidName(action.name));
        }
        if self.actions.contains_key(&action.name) {
            return Err(InferenceError::DuplicateName(action.name));
        }
        action.validate(&self.predicates, &self.types)?;
        if let Some(ll) = low_level {
            self.low_level.insert(ll.name.clone(), ll);
        }
        self.actions.insert(action.name.clone(), action);
        Ok(())
    }

    /// Copies `from` under `to`, sharing its low-level action.
    pub fn copy_action(&mut self, from: &str, to: &str) -> Result<&HighLevelAction, InferenceError> {
        let to = to.to_ascii_lowercase();
        if !is_valid_name(&to) {
            return Err(InferenceError::InvalidName(to));
        }
        if self.actions.contains_key(&to) {
            return Err(InferenceError::DuplicateName(to));
        }
        let mut copy = self.action(from)?.clone();
        copy.name = to.clone();
        Ok(self.actions.entry(to).or_insert(copy))
    }

    /// Applies `edit` to the named action; a rename re-keys it.
    pub fn edit_action(&mut self, name: &str, edit: &ActionEdit) -> Result<&HighLevelAction, InferenceError> {
        let next = edit_action(self.action(name)?, edit, &self.predicates, &self.types)?;
        if next.name != name && self.actions.contains_key(&next.name) {
            return Err(InferenceError::DuplicateName(next.name));
        }
        self.actions.remove(name);
        let key = next.name.clone();
        Ok(self.actions.entry(key).or_insert(next))
    }

    pub fn remove_action(&mut self, name: &str) -> Result<HighLevelAction, InferenceError> {
        self.actions.remove(name).ok_or_else(|| InferenceError::UnknownAction(name.to_string()))
    }

    /// The domain as PDDL, actions in name order.
    pub fn to_pddl(&self) -> PddlDomain {
        PddlDomain {
            name: self.name.clone(),
            requirements: REQUIREMENTS.iter().map(|r| r.to_string()).collect(),
            types: self.types.clone(),
            predicates: self.predicates.clone(),
            actions: self.actions.values().map(HighLevelAction::schema).collect(),
        }
    }
}
