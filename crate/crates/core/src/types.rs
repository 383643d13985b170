//! Type tags and the single-inheritance type hierarchy shared by scenes,
//! action parameters and PDDL domains.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of a type in the hierarchy. Always stored lowercase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct TypeTag(String);

impl TypeTag {
    pub fn new(name: impl AsRef<str>) -> Self {
        TypeTag(name.as_ref().to_ascii_lowercase())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn element() -> Self {
        TypeTag::new("element")
    }

    pub fn position() -> Self {
        TypeTag::new("position")
    }

    pub fn object() -> Self {
        TypeTag::new("object")
    }

    pub fn base() -> Self {
        TypeTag::new("base")
    }

    pub fn cube() -> Self {
        TypeTag::new("cube")
    }

    pub fn roof() -> Self {
        TypeTag::new("roof")
    }
}

impl From<String> for TypeTag {
    fn from(s: String) -> Self {
        TypeTag::new(s)
    }
}

impl From<&str> for TypeTag {
    fn from(s: &str) -> Self {
        TypeTag::new(s)
    }
}

impl From<TypeTag> for String {
    fn from(t: TypeTag) -> Self {
        t.0
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unknown type `{0}`")]
    UnknownType(TypeTag),
    #[error("type `{0}` already declared with parent {1:?}")]
    Redeclared(TypeTag, Option<TypeTag>),
    #[error("type declaration for `{0}` would create a cycle")]
    Cycle(TypeTag),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TypeEntry {
    name: TypeTag,
    parent: Option<TypeTag>,
}

/// A forest of types with single inheritance.
///
/// Declaration order is kept so that printed type clauses are stable, but
/// equality only compares the parent relation.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<TypeEntry>", into = "Vec<TypeEntry>")]
pub struct TypeHierarchy {
    order: Vec<TypeTag>,
    parents: BTreeMap<TypeTag, Option<TypeTag>>,
}

impl PartialEq for TypeHierarchy {
    fn eq(&self, other: &Self) -> bool {
        self.parents == other.parents
    }
}

impl Eq for TypeHierarchy {}

impl From<Vec<TypeEntry>> for TypeHierarchy {
    fn from(entries: Vec<TypeEntry>) -> Self {
        let mut h = TypeHierarchy::default();
        for e in entries {
            h.order.push(e.name.clone());
            h.parents.insert(e.name, e.parent);
        }
        h
    }
}

impl From<TypeHierarchy> for Vec<TypeEntry> {
    fn from(h: TypeHierarchy) -> Self {
        h.order
            .iter()
            .map(|t| TypeEntry { name: t.clone(), parent: h.parents[t].clone() })
            .collect()
    }
}

impl TypeHierarchy {
    pub fn empty() -> Self {
        Self::default()
    }

    /// ELEMENT at the root, POSITION and OBJECT below it, BASE, CUBE and ROOF
    /// below OBJECT.
    pub fn builtin() -> Self {
        let mut h = Self::empty();
        let decls = [
            (TypeTag::element(), None),
            (TypeTag::position(), Some(TypeTag::element())),
            (TypeTag::object(), Some(TypeTag::element())),
            (TypeTag::base(), Some(TypeTag::object())),
            (TypeTag::cube(), Some(TypeTag::object())),
            (TypeTag::roof(), Some(TypeTag::object())),
        ];
        for (t, p) in decls {
            h.declare(t, p).expect("builtin hierarchy is well formed");
        }
        h
    }

    /// Registers `ty` under `parent`. The parent must already be registered,
    /// which rules out cycles. Re-declaring with the same parent is a no-op.
    pub fn declare(&mut self, ty: TypeTag, parent: Option<TypeTag>) -> Result<(), TypeError> {
        if let Some(existing) = self.parents.get(&ty) {
            if *existing == parent {
                return Ok(());
            }
            return Err(TypeError::Redeclared(ty, existing.clone()));
        }
        if let Some(p) = &parent {
            if *p == ty {
                return Err(TypeError::Cycle(ty));
            }
            if !self.contains(p) {
                return Err(TypeError::UnknownType(p.clone()));
            }
        }
        self.order.push(ty.clone());
        self.parents.insert(ty, parent);
        Ok(())
    }

    /// Builds a hierarchy from unordered (child, parent) pairs, as they come
    /// out of a PDDL `:types` section. Parents that never appear as a child
    /// become roots.
    pub fn from_pairs(pairs: &[(TypeTag, Option<TypeTag>)]) -> Result<Self, TypeError> {
        let mut wanted: BTreeMap<TypeTag, Option<TypeTag>> = BTreeMap::new();
        let mut order: Vec<TypeTag> = Vec::new();
        for (child, parent) in pairs {
            match wanted.get(child) {
                Some(existing) if existing != parent => {
                    return Err(TypeError::Redeclared(child.clone(), existing.clone()));
                }
                Some(_) => {}
                None => {
                    wanted.insert(child.clone(), parent.clone());
                    order.push(child.clone());
                }
            }
        }
        for (_, parent) in pairs {
            if let Some(p) = parent {
                if !wanted.contains_key(p) {
                    wanted.insert(p.clone(), None);
                    order.push(p.clone());
                }
            }
        }
        let mut h = Self::empty();
        let mut pending = order;
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for t in pending {
                let parent = wanted[&t].clone();
                match &parent {
                    Some(p) if !h.contains(p) => rest.push(t),
                    _ => h.declare(t, parent)?,
                }
            }
            if rest.len() == before {
                return Err(TypeError::Cycle(rest[0].clone()));
            }
            pending = rest;
        }
        Ok(h)
    }

    pub fn contains(&self, ty: &TypeTag) -> bool {
        self.parents.contains_key(ty)
    }

    pub fn parent(&self, ty: &TypeTag) -> Option<&TypeTag> {
        self.parents.get(ty).and_then(|p| p.as_ref())
    }

    /// Types in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = &TypeTag> {
        self.order.iter()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// True iff `ancestor` is on the parent chain of `ty` (reflexive).
    /// Unregistered tags are never subtypes of anything.
    pub fn is_subtype(&self, ty: &TypeTag, ancestor: &TypeTag) -> bool {
        if !self.contains(ty) || !self.contains(ancestor) {
            return false;
        }
        let mut cur = Some(ty);
        while let Some(t) = cur {
            if t == ancestor {
                return true;
            }
            cur = self.parent(t);
        }
        false
    }

    /// Direct children of `ty`, in declaration order.
    pub fn children(&self, ty: &TypeTag) -> Vec<&TypeTag> {
        self.order.iter().filter(|t| self.parent(t) == Some(ty)).collect()
    }

    pub fn is_leaf(&self, ty: &TypeTag) -> bool {
        self.contains(ty) && self.children(ty).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtin() -> Vec<TypeTag> {
        TypeHierarchy::builtin().iter().cloned().collect()
    }

    #[test]
    fn subtype_examples() {
        let h = TypeHierarchy::builtin();
        assert!(h.is_subtype(&TypeTag::cube(), &TypeTag::object()));
        assert!(!h.is_subtype(&TypeTag::position(), &TypeTag::object()));
        assert!(h.is_subtype(&TypeTag::element(), &TypeTag::element()));
        assert!(h.is_subtype(&TypeTag::roof(), &TypeTag::element()));
        assert!(!h.is_subtype(&TypeTag::object(), &TypeTag::cube()));
        assert!(!h.is_subtype(&TypeTag::new("thing"), &TypeTag::element()));
    }

    #[test]
    fn subtype_is_a_partial_order() {
        let h = TypeHierarchy::builtin();
        let tags = all_builtin();
        assert_eq!(tags.len(), 6);
        for a in &tags {
            assert!(h.is_subtype(a, a));
            for b in &tags {
                if a != b && h.is_subtype(a, b) {
                    assert!(!h.is_subtype(b, a), "{a} and {b}");
                }
                for c in &tags {
                    if h.is_subtype(a, b) && h.is_subtype(b, c) {
                        assert!(h.is_subtype(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn builtin_shape() {
        let h = TypeHierarchy::builtin();
        assert_eq!(h.parent(&TypeTag::element()), None);
        assert_eq!(h.children(&TypeTag::element()), vec![&TypeTag::position(), &TypeTag::object()]);
        assert_eq!(
            h.children(&TypeTag::object()),
            vec![&TypeTag::base(), &TypeTag::cube(), &TypeTag::roof()]
        );
        assert!(h.is_leaf(&TypeTag::cube()));
        assert!(!h.is_leaf(&TypeTag::object()));
    }

    #[test]
    fn declare_rejects_unknown_parent_and_redeclaration() {
        let mut h = TypeHierarchy::builtin();
        assert!(matches!(
            h.declare(TypeTag::new("disk"), Some(TypeTag::new("peg"))),
            Err(TypeError::UnknownType(_))
        ));
        assert!(matches!(
            h.declare(TypeTag::cube(), Some(TypeTag::element())),
            Err(TypeError::Redeclared(..))
        ));
        h.declare(TypeTag::cube(), Some(TypeTag::object())).unwrap();
    }

    #[test]
    fn from_pairs_detects_cycles_and_implicit_roots() {
        let h = TypeHierarchy::from_pairs(&[
            (TypeTag::new("a"), Some(TypeTag::new("b"))),
            (TypeTag::new("c"), None),
        ])
        .unwrap();
        assert_eq!(h.parent(&TypeTag::new("b")), None);
        assert!(h.is_subtype(&TypeTag::new("a"), &TypeTag::new("b")));

        let err = TypeHierarchy::from_pairs(&[
            (TypeTag::new("a"), Some(TypeTag::new("b"))),
            (TypeTag::new("b"), Some(TypeTag::new("a"))),
        ]);
        assert!(matches!(err, Err(TypeError::Cycle(_))));
    }

    #[test]
    fn equality_ignores_declaration_order() {
        let a = TypeHierarchy::builtin();
        let b = TypeHierarchy::from_pairs(&[
            (TypeTag::roof(), Some(TypeTag::object())),
            (TypeTag::cube(), Some(TypeTag::object())),
            (TypeTag::base(), Some(TypeTag::object())),
            (TypeTag::object(), Some(TypeTag::element())),
            (TypeTag::position(), Some(TypeTag::element())),
        ])
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tags_are_lowercased() {
        assert_eq!(TypeTag::new("CUBE"), TypeTag::cube());
        let json = serde_json::to_string(&TypeTag::new("Roof")).unwrap();
        assert_eq!(json, "\"roof\"");
    }
}
