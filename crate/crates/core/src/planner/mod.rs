//! Grounding of typed STRIPS tasks and an FF-style planner: relaxed
//! planning graph heuristic, enforced hill-climbing with helpful actions,
//! greedy best-first fallback, plus breadth-first optimal search.

mod ground;
mod heuristic;
mod oracle;
mod search;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::{Atom, Literal};
use crate::pddl::PddlError;
use crate::types::TypeTag;

pub use ground::{ground_task, substitutions};
pub use heuristic::{h_ff, Heuristic};
pub use oracle::{bfs_oracle, OracleResult};
pub use search::plan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("no plan exists")]
    NoSolution,
    #[error("search stopped after {expanded} expansions ({reason})")]
    ResourceLimit { expanded: usize, reason: LimitReason },
    #[error("state space exceeds {0} states")]
    TooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitReason {
    Nodes,
    Time,
    Cancelled,
}

impl fmt::Display for LimitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitReason::Nodes => "node limit",
            LimitReason::Time => "time limit",
            LimitReason::Cancelled => "cancelled",
        })
    }
}

/// One instantiated action. Indices point into [`PlanningTask::facts`];
/// `pre_pos`, `pre_neg`, `add` and `del` only use positive facts, while
/// `pre`, `eff_add` and `eff_del` are the compiled form in which a negative
/// precondition is a complementary fact kept in sync by mirrored effects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub pre_pos: Vec<usize>,
    pub pre_neg: Vec<usize>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pub pre: Vec<usize>,
    pub eff_add: Vec<usize>,
    pub eff_del: Vec<usize>,
}

impl GroundAction {
    pub fn step(&self) -> PlanStep {
        PlanStep { name: self.name.clone(), args: self.args.clone() }
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.args.join(", "))
    }
}

/// A grounded task. Facts are literals: the positive ones are ordinary
/// atoms, a negative one `not p` is true exactly when `p` is false.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanningTask {
    pub facts: Vec<Literal>,
    pub index: HashMap<Literal, usize>,
    /// Complementary fact of each fact, when one exists.
    pub complement: Vec<Option<usize>>,
    /// Sorted by name then arguments.
    pub actions: Vec<GroundAction>,
    pub init: FixedBitSet,
    pub goal_pos: FixedBitSet,
    pub goal_neg: FixedBitSet,
    /// Compiled goal facts.
    pub goal: Vec<usize>,
    pub objects: BTreeMap<String, TypeTag>,
}

impl PlanningTask {
    pub fn fact(&self, lit: &Literal) -> Option<usize> {
        self.index.get(lit).copied()
    }

    pub fn atom_index(&self, atom: &Atom) -> Option<usize> {
        self.fact(&Literal::pos(atom.clone()))
    }

    pub fn find_action(&self, name: &str, args: &[String]) -> Option<usize> {
        self.actions
            .binary_search_by(|a| (a.name.as_str(), a.args.as_slice()).cmp(&(name, args)))
            .ok()
    }

    pub fn applicable(&self, state: &FixedBitSet, a: usize) -> bool {
        self.actions[a].pre.iter().all(|&f| state.contains(f))
    }

    pub fn apply(&self, state: &FixedBitSet, a: usize) -> FixedBitSet {
        let mut next = state.clone();
        let act = &self.actions[a];
        for &f in &act.eff_del {
            next.set(f, false);
        }
        for &f in &act.eff_add {
            next.insert(f);
        }
        next
    }

    pub fn is_goal(&self, state: &FixedBitSet) -> bool {
        self.goal.iter().all(|&f| state.contains(f))
    }

    /// The positive atoms true in `state`.
    pub fn atoms_of(&self, state: &FixedBitSet) -> BTreeSet<Atom> {
        state.ones().filter(|&f| self.facts[f].positive).map(|f| self.facts[f].atom.clone()).collect()
    }

    pub fn init_atoms(&self) -> BTreeSet<Atom> {
        self.atoms_of(&self.init)
    }

    /// Ground actions as comparable (name, args, pre, add, del) tuples over
    /// atoms rather than indices.
    pub fn action_signatures(&self) -> BTreeSet<(String, Vec<String>, BTreeSet<Literal>, BTreeSet<Atom>, BTreeSet<Atom>)> {
        let atom = |f: &usize| self.facts[*f].atom.clone();
        self.actions
            .iter()
            .map(|a| {
                let pre = a
                    .pre_pos
                    .iter()
                    .map(|f| Literal::pos(atom(f)))
                    .chain(a.pre_neg.iter().map(|f| Literal::neg(atom(f))))
                    .collect();
                (a.name.clone(), a.args.clone(), pre, a.add.iter().map(atom).collect(), a.del.iter().map(atom).collect())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Enforced hill-climbing, then greedy best-first if that fails.
    #[default]
    Ff,
    /// Breadth-first search: fewest steps.
    Optimal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub node_limit: usize,
    pub time_limit_ms: u64,
    /// Checked every few hundred expansions.
    #[serde(skip)]
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { mode: SearchMode::Ff, node_limit: 2_000_000, time_limit_ms: 30_000, cancel: None }
    }
}

impl SearchConfig {
    pub fn optimal() -> Self {
        SearchConfig { mode: SearchMode::Optimal, ..Self::default() }
    }

    pub fn ff() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlanStep {
    pub name: String,
    pub args: Vec<String>,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.args.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    /// Unit costs: the number of steps.
    pub cost: usize,
}

impl Plan {
    pub fn new(steps: Vec<PlanStep>) -> Self {
        let cost = steps.len();
        Plan { steps, cost }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One numbered line per step: `1. move(obj1, A, C)`.
    pub fn render(&self) -> String {
        self.steps.iter().enumerate().map(|(i, s)| format!("{}. {s}\n", i + 1)).collect()
    }
}

/// Why a plan does not solve its task. Step numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlanFailure {
    #[error("step {step}: `{action}` is not an action of the task")]
    UnknownAction { step: usize, action: String },
    #[error("step {step}: `{action}` needs {literal}")]
    Precondition { step: usize, action: String, literal: Literal },
    #[error("goal {literal} does not hold at the end")]
    Goal { literal: Literal },
}

/// Simulates the plan over plain atom sets from the initial state.
pub fn validate_plan(task: &PlanningTask, plan: &Plan) -> Result<(), PlanFailure> {
    let mut state = task.init_atoms();
    let atom = |f: &usize| &task.facts[*f].atom;
    for (i, step) in plan.steps.iter().enumerate() {
        let a = task
            .find_action(&step.name, &step.args)
            .map(|a| &task.actions[a])
            .ok_or_else(|| PlanFailure::UnknownAction { step: i + 1, action: step.to_string() })?;
        let failed = a
            .pre_pos
            .iter()
            .map(|f| Literal::pos(atom(f).clone()))
            .chain(a.pre_neg.iter().map(|f| Literal::neg(atom(f).clone())))
            .find(|l| !l.holds_in(&state));
        if let Some(literal) = failed {
            return Err(PlanFailure::Precondition { step: i + 1, action: step.to_string(), literal });
        }
        for f in &a.del {
            state.remove(atom(f));
        }
        state.extend(a.add.iter().map(|f| atom(f).clone()));
    }
    let goal = task
        .goal_pos
        .ones()
        .map(|f| Literal::pos(atom(&f).clone()))
        .chain(task.goal_neg.ones().map(|f| Literal::neg(atom(&f).clone())));
    for literal in goal {
        if !literal.holds_in(&state) {
            return Err(PlanFailure::Goal { literal });
        }
    }
    Ok(())
}
