//! Typed STRIPS PDDL with negative preconditions: canonical printing and
//! parsing of domains and problems.

mod emit;
mod parse;
pub mod sexpr;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{builtin_predicates, check_atom, ActionSchema, Atom, Literal, PredicateSchema, SchemaError};
use crate::types::{TypeHierarchy, TypeTag};
use crate::world::WorldState;

pub use emit::{emit_domain, emit_problem};
pub use parse::{parse_domain, parse_problem};

/// Requirement flags this dialect understands, in printing order.
pub const REQUIREMENTS: [&str; 3] = ["strips", "typing", "negative-preconditions"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unknown requirement `:{0}`")]
    UnknownRequirement(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("`{predicate}` expects {expected} arguments, got {got}")]
    ArityMismatch { predicate: String, expected: usize, got: usize },
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("undeclared object `{0}`")]
    UndeclaredObject(String),
    #[error("problem is for domain `{got}`, expected `{expected}`")]
    DomainMismatch { expected: String, got: String },
    #[error("duplicate {0} `{1}`")]
    Duplicate(&'static str, String),
    #[error("invalid action `{action}`: {error}")]
    InvalidAction { action: String, error: SchemaError },
    #[error("{0}")]
    Schema(SchemaError),
}

impl From<SchemaError> for PddlError {
    fn from(e: SchemaError) -> Self {
        match e {
            SchemaError::UndeclaredPredicate(p) => PddlError::UndeclaredPredicate(p),
            SchemaError::ArityMismatch { predicate, expected, got } => {
                PddlError::ArityMismatch { predicate, expected, got }
            }
            SchemaError::UnknownType(t) => PddlError::UnknownType(t.to_string()),
            SchemaError::UnknownInstance(o) => PddlError::UndeclaredObject(o),
            other => PddlError::Schema(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PddlDomain {
    pub name: String,
    /// Without the leading colon.
    pub requirements: BTreeSet<String>,
    pub types: TypeHierarchy,
    pub predicates: Vec<PredicateSchema>,
    pub actions: Vec<ActionSchema>,
}

impl PddlDomain {
    /// An empty domain over the built-in types and predicates.
    pub fn builtin(name: &str) -> Self {
        PddlDomain {
            name: name.to_ascii_lowercase(),
            requirements: REQUIREMENTS.iter().map(|r| r.to_string()).collect(),
            types: TypeHierarchy::builtin(),
            predicates: builtin_predicates(),
            actions: Vec::new(),
        }
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    /// Declared types, predicate signatures, unique names, well-formed actions.
    pub fn validate(&self) -> Result<(), PddlError> {
        if let Some(r) = self.requirements.iter().find(|r| !REQUIREMENTS.contains(&r.as_str())) {
            return Err(PddlError::UnknownRequirement(r.clone()));
        }
        let mut names = BTreeSet::new();
        for p in &self.predicates {
            if !names.insert(&p.name) {
                return Err(PddlError::Duplicate("predicate", p.name.clone()));
            }
            if let Some(t) = p.params.iter().find(|t| !self.types.contains(t)) {
                return Err(PddlError::UnknownType(t.to_string()));
            }
        }
        let mut names = BTreeSet::new();
        for a in &self.actions {
            if !names.insert(&a.name) {
                return Err(PddlError::Duplicate("action", a.name.clone()));
            }
            a.validate(&self.predicates, &self.types, false).map_err(|e| match e {
                SchemaError::UnknownType(t) => PddlError::UnknownType(t.to_string()),
                SchemaError::UndeclaredPredicate(p) => PddlError::UndeclaredPredicate(p),
                SchemaError::ArityMismatch { predicate, expected, got } => {
                    PddlError::ArityMismatch { predicate, expected, got }
                }
                error => PddlError::InvalidAction { action: a.name.clone(), error },
            })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PddlProblem {
    pub name: String,
    pub domain_name: String,
    pub objects: BTreeMap<String, TypeTag>,
    pub init: BTreeSet<Atom>,
    pub goal: BTreeSet<Literal>,
}

impl PddlProblem {
    /// A problem whose objects and initial atoms are those of `state`.
    pub fn from_state(name: &str, domain_name: &str, state: &WorldState, goal: BTreeSet<Literal>) -> Self {
        PddlProblem {
            name: name.to_ascii_lowercase(),
            domain_name: domain_name.to_string(),
            objects: state.instances.clone(),
            init: state.atoms.clone(),
            goal,
        }
    }

    /// Checks the problem against its domain: name, object types and the
    /// arity and types of every init and goal atom.
    pub fn check_against(&self, domain: &PddlDomain) -> Result<(), PddlError> {
        if self.domain_name != domain.name {
            return Err(PddlError::DomainMismatch { expected: domain.name.clone(), got: self.domain_name.clone() });
        }
        if let Some(t) = self.objects.values().find(|t| !domain.types.contains(t)) {
            return Err(PddlError::UnknownType(t.to_string()));
        }
        for atom in self.init.iter().chain(self.goal.iter().map(|l| &l.atom)) {
            check_atom(atom, &domain.predicates, &domain.types, |o| self.objects.get(o))?;
        }
        Ok(())
    }
}
