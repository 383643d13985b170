use serde::{Deserialize, Serialize};

use super::{HighLevelAction, InferenceError};
use crate::logic::{check_atom, Atom, Literal, PredicateSchema, SchemaError};
use crate::types::{TypeHierarchy, TypeTag};

/// One user change to a lifted action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ActionEdit {
    SetParamType {
        param: String,
        #[serde(rename = "type")]
        ty: TypeTag,
    },
    AddPre {
        literal: Literal,
    },
    RemovePre {
        literal: Literal,
    },
    AddEffPlus {
        atom: Atom,
    },
    AddEffMinus {
        atom: Atom,
    },
    RemoveEff {
        atom: Atom,
    },
    Rename {
        name: String,
    },
}

fn type_error(e: SchemaError) -> InferenceError {
    match e {
        SchemaError::UndeclaredVariable(v) => InferenceError::UnknownVariable(v),
        SchemaError::ContradictoryPrecondition(a) => InferenceError::ContradictoryPrecondition(a),
        SchemaError::ConflictingEffects(a) => InferenceError::EffectConflict(a),
        other => InferenceError::TypeViolation(other.to_string()),
    }
}

fn check(action: &HighLevelAction, atom: &Atom, predicates: &[PredicateSchema], types: &TypeHierarchy) -> Result<(), InferenceError> {
    check_atom(atom, predicates, types, |v| action.param(v).map(|p| &p.ty)).map_err(type_error)
}

/// Drops parameters no literal mentions any more. A parameter a keyframe
/// frame depends on cannot be dropped this way.
fn prune_params(action: &mut HighLevelAction) -> Result<(), InferenceError> {
    let used = action.schema().used_variables();
    if let Some(p) = action
        .params
        .iter()
        .find(|p| !used.contains(&p.name) && action.origins.get(&p.name).is_some_and(|o| o.anchored))
    {
        return Err(InferenceError::DanglingVariable(p.name.clone()));
    }
    action.params.retain(|p| used.contains(&p.name));
    action.origins.retain(|k, _| used.contains(k));
    Ok(())
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Applies `edit` to a copy of `action` and re-validates the result.
pub fn edit_action(
    action: &HighLevelAction,
    edit: &ActionEdit,
    predicates: &[PredicateSchema],
    types: &TypeHierarchy,
) -> Result<HighLevelAction, InferenceError> {
    let mut next = action.clone();
    match edit {
        ActionEdit::SetParamType { param, ty } => {
            if !types.contains(ty) {
                return Err(InferenceError::TypeViolation(format!("unknown type `{ty}`")));
            }
            let p = next
                .params
                .iter_mut()
                .find(|p| p.name == *param)
                .ok_or_else(|| InferenceError::UnknownVariable(param.clone()))?;
            p.ty = ty.clone();
        }
        ActionEdit::AddPre { literal } => {
            check(&next, &literal.atom, predicates, types)?;
            if next.pre.contains(&literal.negated()) {
                return Err(InferenceError::ContradictoryPrecondition(literal.atom.clone()));
            }
            next.pre.insert(literal.clone());
        }
        ActionEdit::RemovePre { literal } => {
            if !next.pre.remove(literal) {
                return Err(InferenceError::NotFound(literal.to_string()));
            }
            prune_params(&mut next)?;
        }
        ActionEdit::AddEffPlus { atom } => {
            check(&next, atom, predicates, types)?;
            if next.eff_minus.contains(atom) {
                return Err(InferenceError::EffectConflict(atom.clone()));
            }
            next.eff_plus.insert(atom.clone());
        }
        ActionEdit::AddEffMinus { atom } => {
            check(&next, atom, predicates, types)?;
            if next.eff_plus.contains(atom) {
                return Err(InferenceError::EffectConflict(atom.clone()));
            }
            next.eff_minus.insert(atom.clone());
        }
        ActionEdit::RemoveEff { atom } => {
            if !next.eff_plus.remove(atom) && !next.eff_minus.remove(atom) {
                return Err(InferenceError::NotFound(atom.to_string()));
            }
            prune_params(&mut next)?;
        }
        ActionEdit::Rename { name } => {
            if !is_valid_name(name) {
                return Err(InferenceError::InvalidName(name.clone()));
            }
            next.name = name.to_ascii_lowercase();
        }
    }
    next.schema().validate(predicates, types, true).map_err(type_error)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inference::ParamOrigin;
    use crate::logic::{builtin_predicates, Parameter};

    fn move_action() -> HighLevelAction {
        HighLevelAction {
            name: "move".into(),
            params: vec![
                Parameter::new("?obj", TypeTag::cube()),
                Parameter::new("?A", TypeTag::position()),
                Parameter::new("?B", TypeTag::position()),
            ],
            pre: [
                Literal::pos(Atom::on("?obj", "?A")),
                Literal::pos(Atom::clear("?B")),
                Literal::neg(Atom::on("?obj", "?B")),
                Literal::neg(Atom::clear("?A")),
            ]
            .into(),
            eff_plus: [Atom::on("?obj", "?B"), Atom::clear("?A")].into(),
            eff_minus: [Atom::on("?obj", "?A"), Atom::clear("?B")].into(),
            low_level: "move".into(),
            origins: [
                ("?obj", "obj", true),
                ("?A", "A", true),
                ("?B", "B", true),
            ]
            .into_iter()
            .map(|(v, i, a)| (v.to_string(), ParamOrigin { instance: i.into(), anchored: a }))
            .collect(),
        }
    }

    fn apply(a: &HighLevelAction, e: ActionEdit) -> Result<HighLevelAction, InferenceError> {
        edit_action(a, &e, &builtin_predicates(), &TypeHierarchy::builtin())
    }

    #[test]
    fn widening_types() {
        let a = apply(&move_action(), ActionEdit::SetParamType { param: "?B".into(), ty: TypeTag::element() }).unwrap();
        assert_eq!(a.param("?B").unwrap().ty, TypeTag::element());
        let a = apply(&a, ActionEdit::SetParamType { param: "?obj".into(), ty: TypeTag::object() }).unwrap();
        assert_eq!(a.param("?obj").unwrap().ty, TypeTag::object());
    }

    #[test]
    fn widening_past_the_schema_is_a_type_violation() {
        for ty in [TypeTag::element(), TypeTag::position()] {
            let r = apply(&move_action(), ActionEdit::SetParamType { param: "?obj".into(), ty });
            assert!(matches!(r, Err(InferenceError::TypeViolation(_))), "{r:?}");
        }
    }

    #[test]
    fn adding_thin() {
        let a = apply(&move_action(), ActionEdit::AddPre { literal: Literal::pos(Atom::thin("?obj")) }).unwrap();
        assert!(a.pre.contains(&Literal::pos(Atom::thin("?obj"))));
        let r = apply(&move_action(), ActionEdit::AddPre { literal: Literal::pos(Atom::thin("?A")) });
        assert!(matches!(r, Err(InferenceError::TypeViolation(_))));
        let r = apply(&move_action(), ActionEdit::AddPre { literal: Literal::pos(Atom::thin("?Z")) });
        assert_eq!(r, Err(InferenceError::UnknownVariable("?Z".into())));
        let r = apply(&move_action(), ActionEdit::AddPre { literal: Literal::pos(Atom::on("?obj", "?B")) });
        assert!(matches!(r, Err(InferenceError::ContradictoryPrecondition(_))));
    }

    #[test]
    fn effect_disjointness() {
        let r = apply(&move_action(), ActionEdit::AddEffPlus { atom: Atom::on("?obj", "?A") });
        assert!(matches!(r, Err(InferenceError::EffectConflict(_))));
        let r = apply(&move_action(), ActionEdit::AddEffMinus { atom: Atom::clear("?A") });
        assert!(matches!(r, Err(InferenceError::EffectConflict(_))));
    }

    #[test]
    fn removal_and_dangling_variables() {
        let mut a = move_action();
        for l in a.pre.clone() {
            if l.atom.mentions("?B") {
                a = apply(&a, ActionEdit::RemovePre { literal: l }).unwrap();
            }
        }
        a = apply(&a, ActionEdit::RemoveEff { atom: Atom::on("?obj", "?B") }).unwrap();
        let r = apply(&a, ActionEdit::RemoveEff { atom: Atom::clear("?B") });
        assert_eq!(r, Err(InferenceError::DanglingVariable("?B".into())));

        let mut loose = a.clone();
        loose.origins.get_mut("?B").unwrap().anchored = false;
        let pruned = apply(&loose, ActionEdit::RemoveEff { atom: Atom::clear("?B") }).unwrap();
        assert!(pruned.param("?B").is_none());
        assert!(!pruned.origins.contains_key("?B"));

        let r = apply(&a, ActionEdit::RemovePre { literal: Literal::pos(Atom::flat("?obj")) });
        assert!(matches!(r, Err(InferenceError::NotFound(_))));
    }

    #[test]
    fn rename() {
        let a = apply(&move_action(), ActionEdit::Rename { name: "Move_Claw".into() }).unwrap();
        assert_eq!(a.name, "move_claw");
        assert!(matches!(apply(&a, ActionEdit::Rename { name: "2x".into() }), Err(InferenceError::InvalidName(_))));
    }

    #[test]
    fn edits_do_not_touch_the_original() {
        let a = move_action();
        let _ = apply(&a, ActionEdit::AddPre { literal: Literal::pos(Atom::thin("?obj")) }).unwrap();
        assert_eq!(a, move_action());
    }

    #[test]
    fn edit_json_shape() {
        let e: ActionEdit = serde_json::from_str(r#"{"op":"set_param_type","param":"?obj","type":"OBJECT"}"#).unwrap();
        assert_eq!(e, ActionEdit::SetParamType { param: "?obj".into(), ty: TypeTag::object() });
        let e: ActionEdit =
            serde_json::from_str(r#"{"op":"add_pre","literal":{"atom":{"predicate":"thin","args":["?obj"]},"positive":true}}"#)
                .unwrap();
        assert_eq!(e, ActionEdit::AddPre { literal: Literal::pos(Atom::thin("?obj")) });
    }
}
