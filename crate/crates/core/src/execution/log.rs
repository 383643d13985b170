use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::logic::Atom;
use crate::planner::PlanStep;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Ok,
    Rejected,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub step: PlanStep,
    /// Demo-time landmark id to the instance it was bound to.
    pub bindings: BTreeMap<String, String>,
    pub pre_state: BTreeSet<Atom>,
    pub post_state: BTreeSet<Atom>,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Append-only record of executed steps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExecutionLog {
    entries: Vec<LogEntry>,
}

impl ExecutionLog {
    pub fn push(&mut self, entry: LogEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("log serializes")
    }

    /// One block per step: the action and outcome, the bindings, and the
    /// atoms the step added and removed in the believed state.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            let outcome = match e.outcome {
                Outcome::Ok => "OK",
                Outcome::Rejected => "REJECTED",
                Outcome::Failed => "FAILED",
            };
            let _ = writeln!(out, "{}. {} [{outcome}]", i + 1, e.step);
            if !e.bindings.is_empty() {
                let b: Vec<String> = e.bindings.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
                let _ = writeln!(out, "   bindings: {}", b.join(", "));
            }
            let list = |s: BTreeSet<&Atom>| s.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", ");
            let added: BTreeSet<&Atom> = e.post_state.difference(&e.pre_state).collect();
            let removed: BTreeSet<&Atom> = e.pre_state.difference(&e.post_state).collect();
            if !added.is_empty() {
                let _ = writeln!(out, "   added: {}", list(added));
            }
            if !removed.is_empty() {
                let _ = writeln!(out, "   removed: {}", list(removed));
            }
            if let Some(err) = &e.error {
                let _ = writeln!(out, "   error: {err}");
            }
        }
        out
    }
}
