//! Atoms, literals, predicate schemas and lifted action schemas.
//!
//! Arguments starting with `?` are variables; everything else is an
//! instance id. Ground and lifted atoms share one representation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{TypeHierarchy, TypeTag};

pub const CLEAR: &str = "clear";
pub const ON: &str = "on";
pub const STACKABLE: &str = "stackable";
pub const FLAT: &str = "flat";
pub const THIN: &str = "thin";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new<S: Into<String>>(predicate: &str, args: impl IntoIterator<Item = S>) -> Self {
        Atom {
            predicate: predicate.to_ascii_lowercase(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }

    pub fn on(x: &str, y: &str) -> Self {
        Atom::new(ON, [x, y])
    }

    pub fn clear(x: &str) -> Self {
        Atom::new(CLEAR, [x])
    }

    pub fn stackable(x: &str, y: &str) -> Self {
        Atom::new(STACKABLE, [x, y])
    }

    pub fn flat(x: &str) -> Self {
        Atom::new(FLAT, [x])
    }

    pub fn thin(x: &str) -> Self {
        Atom::new(THIN, [x])
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|a| !is_variable(a))
    }

    pub fn mentions(&self, id: &str) -> bool {
        self.args.iter().any(|a| a == id)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().map(String::as_str).filter(|a| is_variable(a))
    }

    /// Replaces every argument found in `map`; others are kept.
    pub fn substitute(&self, map: &BTreeMap<String, String>) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone())).collect(),
        }
    }

    /// PDDL form, e.g. `(on obj1 A)`.
    pub fn to_pddl(&self) -> String {
        let mut s = format!("({}", self.predicate);
        for a in &self.args {
            s.push(' ');
            s.push_str(a);
        }
        s.push(')');
        s
    }
}

/// First-order form, e.g. `on(obj, A)`.
impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(a)?;
        }
        f.write_str(")")
    }
}

pub fn is_variable(arg: &str) -> bool {
    arg.starts_with('?')
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub atom: Atom,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negated(&self) -> Self {
        Literal { atom: self.atom.clone(), positive: !self.positive }
    }

    /// Closed-world truth in a set of positive atoms.
    pub fn holds_in(&self, atoms: &BTreeSet<Atom>) -> bool {
        atoms.contains(&self.atom) == self.positive
    }

    pub fn substitute(&self, map: &BTreeMap<String, String>) -> Literal {
        Literal { atom: self.atom.substitute(map), positive: self.positive }
    }

    pub fn to_pddl(&self) -> String {
        if self.positive {
            self.atom.to_pddl()
        } else {
            format!("(not {})", self.atom.to_pddl())
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "not {}", self.atom)
        }
    }
}

/// Positive literals first, each group sorted by predicate then arguments.
pub fn canonical_order<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> Vec<&'a Literal> {
    let mut v: Vec<&Literal> = lits.into_iter().collect();
    v.sort_by(|a, b| b.positive.cmp(&a.positive).then_with(|| a.atom.cmp(&b.atom)));
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateSchema {
    pub name: String,
    pub params: Vec<TypeTag>,
}

impl PredicateSchema {
    pub fn new(name: &str, params: Vec<TypeTag>) -> Self {
        PredicateSchema { name: name.to_ascii_lowercase(), params }
    }
}

/// clear(ELEMENT), on(OBJECT, ELEMENT), stackable(OBJECT, ELEMENT),
/// flat(OBJECT), thin(OBJECT).
pub fn builtin_predicates() -> Vec<PredicateSchema> {
    vec![
        PredicateSchema::new(CLEAR, vec![TypeTag::element()]),
        PredicateSchema::new(ON, vec![TypeTag::object(), TypeTag::element()]),
        PredicateSchema::new(STACKABLE, vec![TypeTag::object(), TypeTag::element()]),
        PredicateSchema::new(FLAT, vec![TypeTag::object()]),
        PredicateSchema::new(THIN, vec![TypeTag::object()]),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("`{predicate}` expects {expected} arguments, got {got}")]
    ArityMismatch { predicate: String, expected: usize, got: usize },
    #[error("unknown type `{0}`")]
    UnknownType(TypeTag),
    #[error("argument `{arg}` of type `{ty}` does not fit `{predicate}` slot of type `{expected}`")]
    TypeMismatch { predicate: String, arg: String, ty: TypeTag, expected: TypeTag },
    #[error("variable `{0}` is not a parameter")]
    UndeclaredVariable(String),
    #[error("duplicate parameter `{0}`")]
    DuplicateParameter(String),
    #[error("parameter `{0}` is not used by any condition or effect")]
    UnusedParameter(String),
    #[error("`{0}` is both added and deleted")]
    ConflictingEffects(Atom),
    #[error("`{0}` is required both true and false")]
    ContradictoryPrecondition(Atom),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
}

/// Checks arity and argument types of `atom` against the predicate table.
/// `type_of` resolves an argument (variable or instance) to its type.
pub fn check_atom<'a>(
    atom: &Atom,
    predicates: &[PredicateSchema],
    types: &TypeHierarchy,
    type_of: impl Fn(&str) -> Option<&'a TypeTag>,
) -> Result<(), SchemaError> {
    let schema = predicates
        .iter()
        .find(|p| p.name == atom.predicate)
        .ok_or_else(|| SchemaError::UndeclaredPredicate(atom.predicate.clone()))?;
    if schema.params.len() != atom.args.len() {
        return Err(SchemaError::ArityMismatch {
            predicate: atom.predicate.clone(),
            expected: schema.params.len(),
            got: atom.args.len(),
        });
    }
    for (arg, expected) in atom.args.iter().zip(&schema.params) {
        let ty = type_of(arg).ok_or_else(|| {
            if is_variable(arg) {
                SchemaError::UndeclaredVariable(arg.clone())
            } else {
                SchemaError::UnknownInstance(arg.clone())
            }
        })?;
        if !types.is_subtype(ty, expected) {
            return Err(SchemaError::TypeMismatch {
                predicate: atom.predicate.clone(),
                arg: arg.clone(),
                ty: ty.clone(),
                expected: expected.clone(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TypeTag,
}

impl Parameter {
    pub fn new(name: &str, ty: TypeTag) -> Self {
        Parameter { name: name.to_string(), ty }
    }
}

/// The symbolic part of an action: what the planner and PDDL see.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<Parameter>,
    pub pre: BTreeSet<Literal>,
    pub add: BTreeSet<Atom>,
    pub del: BTreeSet<Atom>,
}

impl ActionSchema {
    pub fn param(&self, name: &str) -> Option<&Parameter> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Variables mentioned by any precondition or effect.
    pub fn used_variables(&self) -> BTreeSet<String> {
        self.pre
            .iter()
            .map(|l| &l.atom)
            .chain(self.add.iter())
            .chain(self.del.iter())
            .flat_map(|a| a.variables().map(str::to_string))
            .collect()
    }

    /// Structural invariants: unique parameters, every variable declared,
    /// well-typed literals, disjoint effects, no literal required both ways.
    /// With `require_used`, every parameter must also occur somewhere.
    pub fn validate(
        &self,
        predicates: &[PredicateSchema],
        types: &TypeHierarchy,
        require_used: bool,
    ) -> Result<(), SchemaError> {
        let mut seen = BTreeSet::new();
        for p in &self.params {
            if !seen.insert(p.name.as_str()) {
                return Err(SchemaError::DuplicateParameter(p.name.clone()));
            }
            if !types.contains(&p.ty) {
                return Err(SchemaError::UnknownType(p.ty.clone()));
            }
        }
        let type_of = |arg: &str| self.param(arg).map(|p| &p.ty);
        for atom in self.pre.iter().map(|l| &l.atom).chain(&self.add).chain(&self.del) {
            for a in &atom.args {
                if !is_variable(a) {
                    return Err(SchemaError::UnknownInstance(a.clone()));
                }
            }
            check_atom(atom, predicates, types, type_of)?;
        }
        if let Some(a) = self.add.intersection(&self.del).next() {
            return Err(SchemaError::ConflictingEffects(a.clone()));
        }
        for l in &self.pre {
            if l.positive && self.pre.contains(&l.negated()) {
                return Err(SchemaError::ContradictoryPrecondition(l.atom.clone()));
            }
        }
        if require_used {
            let used = self.used_variables();
            if let Some(p) = self.params.iter().find(|p| !used.contains(&p.name)) {
                return Err(SchemaError::UnusedParameter(p.name.clone()));
            }
        }
        Ok(())
    }
}
