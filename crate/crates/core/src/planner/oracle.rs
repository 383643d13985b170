use std::collections::{BTreeSet, HashSet, VecDeque};

use super::{PlannerError, PlanningTask};

/// States a [`bfs_oracle`] run may visit.
pub const ORACLE_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleResult {
    Cost(usize),
    Unsolvable,
}

/// Length of a shortest plan by breadth-first search over sets of true
/// atoms, checking preconditions and goals as literals rather than through
/// the compiled complementary facts.
pub fn bfs_oracle(task: &PlanningTask) -> Result<OracleResult, PlannerError> {
    let init: BTreeSet<usize> = task.init.ones().filter(|&f| task.facts[f].positive).collect();
    let goal_pos: Vec<usize> = task.goal_pos.ones().collect();
    let goal_neg: Vec<usize> = task.goal_neg.ones().collect();
    let is_goal = |s: &BTreeSet<usize>| goal_pos.iter().all(|f| s.contains(f)) && !goal_neg.iter().any(|f| s.contains(f));
    if is_goal(&init) {
        return Ok(OracleResult::Cost(0));
    }
    let mut seen = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([(init, 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        for a in &task.actions {
            if !a.pre_pos.iter().all(|f| s.contains(f)) || a.pre_neg.iter().any(|f| s.contains(f)) {
                continue;
            }
            let mut next = s.clone();
            for f in &a.del {
                next.remove(f);
            }
            next.extend(a.add.iter().copied());
            if seen.contains(&next) {
                continue;
            }
            if is_goal(&next) {
                return Ok(OracleResult::Cost(d + 1));
            }
            if seen.len() >= ORACLE_STATE_LIMIT {
                return Err(PlannerError::TooLarge(ORACLE_STATE_LIMIT));
            }
            seen.insert(next.clone());
            queue.push_back((next, d + 1));
        }
    }
    Ok(OracleResult::Unsolvable)
}
