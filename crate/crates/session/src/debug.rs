//! The debug menu: the whole domain and a problem in plain English, with
//! hints about why planning may fail.

use std::collections::{BTreeMap, BTreeSet};

use irp_core::inference::{render_action, render_atom, render_literal, HighLevelAction};
use irp_core::logic::{canonical_order, is_variable, Atom, Literal};
use irp_core::planner::ground_task;
use irp_core::types::TypeTag;
use serde::{Deserialize, Serialize};

use crate::session::{Session, SessionError};

/// Opening words of the hint for goals no action can bring about.
pub const GOAL_HINT: &str = "make sure the action effects can achieve the goal states";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HintKind {
    /// A goal literal no action can make true.
    UnachievableGoal,
    /// A precondition predicate that neither the initial state nor any
    /// action ever provides.
    UnprovidedPrecondition,
    /// The initial state breaks the clear/on coupling.
    InconsistentInit,
    /// A goal atom whose arguments do not fit the parameter types of the
    /// actions that produce its predicate.
    GoalTypeMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    pub kind: HintKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSummary {
    pub name: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DebugReport {
    pub problem: String,
    pub actions: Vec<ActionSummary>,
    pub init: Vec<String>,
    pub goal: Vec<String>,
    pub last_failure: Option<String>,
    pub hints: Vec<Hint>,
}

impl DebugReport {
    pub fn has(&self, kind: HintKind) -> bool {
        self.hints.iter().any(|h| h.kind == kind)
    }
}

impl Session {
    /// Summarises the domain and the problem `name` with hints.
    pub fn debug_summary(&self, name: &str) -> Result<DebugReport, SessionError> {
        let problem = self.problem(name)?;
        let init = &problem.model.atoms;
        let actions: Vec<ActionSummary> = self
            .domain
            .actions
            .values()
            .map(|a| ActionSummary {
                name: a.name.clone(),
                lines: render_action(a),
            })
            .collect();
        let mut hints = Vec::new();

        let achievable = self.achievable_goals(name);
        for l in &problem.goal {
            if l.holds_in(&init.atoms) {
                continue;
            }
            let reachable = match &achievable {
                Some(set) => set.contains(l),
                None => self.lifted_achievers(l, &init.instances).next().is_some(),
            };
            if !reachable {
                let verb = if l.positive { "adds" } else { "removes" };
                hints.push(Hint {
                    kind: HintKind::UnachievableGoal,
                    message: format!("{GOAL_HINT}: no action {verb} {}", l.atom),
                });
            }
        }

        let mut reported = BTreeSet::new();
        for a in self.domain.actions.values() {
            for l in canonical_order(&a.pre).into_iter().filter(|l| l.positive) {
                let p = &l.atom.predicate;
                let provided = init.atoms.iter().any(|x| &x.predicate == p)
                    || self
                        .domain
                        .actions
                        .values()
                        .any(|b| b.eff_plus.iter().any(|x| &x.predicate == p));
                if !provided && reported.insert((a.name.clone(), p.clone())) {
                    hints.push(Hint {
                        kind: HintKind::UnprovidedPrecondition,
                        message: format!(
                            "`{}` needs \"{}\" but neither the initial state nor any action provides `{p}`",
                            a.name,
                            render_literal(l)
                        ),
                    });
                }
            }
        }

        for v in init.coupling_violations() {
            hints.push(Hint {
                kind: HintKind::InconsistentInit,
                message: format!("the initial state is inconsistent: {v}"),
            });
        }

        for l in problem.goal.iter().filter(|l| !l.holds_in(&init.atoms)) {
            let producers: Vec<_> = self.producers(l).collect();
            if producers.is_empty() || self.lifted_achievers(l, &init.instances).next().is_some() {
                continue;
            }
            let reasons: Vec<String> = producers
                .iter()
                .filter_map(|(action, effect)| {
                    let (i, param) = effect.args.iter().enumerate().find(|(i, v)| {
                        let arg = &l.atom.args[*i];
                        let fits = |ty| {
                            init.type_of(arg)
                                .is_some_and(|t| self.domain.types.is_subtype(t, ty))
                        };
                        is_variable(v) && !action.param(v).is_some_and(|p| fits(&p.ty))
                    })?;
                    let ty = action
                        .param(param)
                        .map(|p| p.ty.as_str().to_ascii_uppercase())
                        .unwrap_or_default();
                    let arg = &l.atom.args[i];
                    let arg_ty = init
                        .type_of(arg)
                        .map(|t| t.as_str().to_ascii_uppercase())
                        .unwrap_or_default();
                    Some(format!(
                        "`{}` takes {param} as a {ty} but {arg} is a {arg_ty}",
                        action.name
                    ))
                })
                .collect();
            if !reasons.is_empty() {
                hints.push(Hint {
                    kind: HintKind::GoalTypeMismatch,
                    message: format!("goal {}: {}", render_literal(l), reasons.join("; ")),
                });
            }
        }

        Ok(DebugReport {
            problem: name.to_string(),
            actions,
            init: init.atoms.iter().map(render_atom).collect(),
            goal: problem.goal.iter().map(render_literal).collect(),
            last_failure: problem.last_failure.clone(),
            hints,
        })
    }

    /// Goal literals some ground action makes true, or `None` when the
    /// problem cannot be grounded.
    fn achievable_goals(&self, name: &str) -> Option<BTreeSet<Literal>> {
        let problem = self.problem_pddl(name).ok()?;
        let task = ground_task(&self.domain.to_pddl(), &problem).ok()?;
        let mut out = BTreeSet::new();
        for a in &task.actions {
            for &f in &a.add {
                out.insert(Literal::pos(task.facts[f].atom.clone()));
            }
            for &f in &a.del {
                out.insert(Literal::neg(task.facts[f].atom.clone()));
            }
        }
        Some(out)
    }

    /// Action effects with the goal literal's predicate and polarity.
    fn producers<'a>(
        &'a self,
        goal: &'a Literal,
    ) -> impl Iterator<Item = (&'a HighLevelAction, &'a Atom)> + 'a {
        self.domain.actions.values().flat_map(move |a| {
            let effects = if goal.positive {
                &a.eff_plus
            } else {
                &a.eff_minus
            };
            effects
                .iter()
                .filter(move |e| {
                    e.predicate == goal.atom.predicate && e.args.len() == goal.atom.args.len()
                })
                .map(move |e| (a, e))
        })
    }

    /// Producing effects that unify with the goal atom respecting
    /// parameter types.
    fn lifted_achievers<'a>(
        &'a self,
        goal: &'a Literal,
        instances: &'a BTreeMap<String, TypeTag>,
    ) -> impl Iterator<Item = (&'a HighLevelAction, &'a Atom)> + 'a {
        self.producers(goal).filter(move |(action, effect)| {
            let mut bound: BTreeMap<&str, &str> = BTreeMap::new();
            effect.args.iter().zip(&goal.atom.args).all(|(v, arg)| {
                if !is_variable(v) {
                    return v == arg;
                }
                if bound.insert(v, arg).is_some_and(|prev| prev != arg) {
                    return false;
                }
                let fits = |ty: &TypeTag| {
                    instances
                        .get(arg)
                        .is_some_and(|t| self.domain.types.is_subtype(t, ty))
                };
                action.param(v).is_some_and(|p| fits(&p.ty))
            })
        })
    }
}
