use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;

use super::heuristic::Relaxation;
use super::{validate_plan, LimitReason, Plan, PlannerError, PlanningTask, SearchConfig, SearchMode};

struct Budget<'a> {
    config: &'a SearchConfig,
    start: Instant,
    expanded: usize,
}

impl Budget<'_> {
    fn tick(&mut self) -> Result<(), PlannerError> {
        self.expanded += 1;
        let stop = |reason| Err(PlannerError::ResourceLimit { expanded: self.expanded, reason });
        if self.expanded > self.config.node_limit {
            return stop(LimitReason::Nodes);
        }
        if self.expanded % 256 == 1 {
            if self.start.elapsed() > Duration::from_millis(self.config.time_limit_ms) {
                return stop(LimitReason::Time);
            }
            if self.config.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
                return stop(LimitReason::Cancelled);
            }
        }
        Ok(())
    }
}

struct Node {
    state: FixedBitSet,
    parent: usize,
    action: usize,
}

fn trace(nodes: &[Node], mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while n != 0 {
        out.push(nodes[n].action);
        n = nodes[n].parent;
    }
    out.reverse();
    out
}

fn breadth_first(task: &PlanningTask, budget: &mut Budget) -> Result<Vec<usize>, PlannerError> {
    let mut nodes = vec![Node { state: task.init.clone(), parent: 0, action: usize::MAX }];
    let mut seen: HashSet<FixedBitSet> = HashSet::from([task.init.clone()]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        budget.tick()?;
        for a in 0..task.actions.len() {
            if !task.applicable(&nodes[n].state, a) {
                continue;
            }
            let next = task.apply(&nodes[n].state, a);
            if !seen.insert(next.clone()) {
                continue;
            }
            let goal = task.is_goal(&next);
            nodes.push(Node { state: next, parent: n, action: a });
            if goal {
                return Ok(trace(&nodes, nodes.len() - 1));
            }
            queue.push_back(nodes.len() - 1);
        }
    }
    Err(PlannerError::NoSolution)
}

/// Enforced hill-climbing: from the current state, breadth-first search
/// over helpful actions until a state with a strictly smaller heuristic
/// value turns up. `None` when some such search runs dry.
fn hill_climb(task: &PlanningTask, rel: &Relaxation, budget: &mut Budget) -> Result<Option<Vec<usize>>, PlannerError> {
    let mut path = Vec::new();
    let mut state = task.init.clone();
    let mut h = rel.evaluate(task, &state);
    let Some(mut best) = h.value else {
        return Err(PlannerError::NoSolution);
    };
    while best > 0 {
        let mut nodes = vec![Node { state: state.clone(), parent: 0, action: usize::MAX }];
        let mut helpful = vec![std::mem::take(&mut h.helpful)];
        let mut seen: HashSet<FixedBitSet> = HashSet::from([state.clone()]);
        let mut queue = VecDeque::from([0usize]);
        let mut found = None;
        'search: while let Some(n) = queue.pop_front() {
            budget.tick()?;
            for &a in &helpful[n].clone() {
                let next = task.apply(&nodes[n].state, a);
                if !seen.insert(next.clone()) {
                    continue;
                }
                let hn = rel.evaluate(task, &next);
                let Some(v) = hn.value else { continue };
                nodes.push(Node { state: next, parent: n, action: a });
                helpful.push(hn.helpful.clone());
                let id = nodes.len() - 1;
                if v < best {
                    found = Some((id, v, hn));
                    break 'search;
                }
                queue.push_back(id);
            }
        }
        let Some((id, v, hn)) = found else {
            return Ok(None);
        };
        path.extend(trace(&nodes, id));
        state = nodes.swap_remove(id).state;
        best = v;
        h = hn;
    }
    Ok(Some(path))
}

/// Greedy best-first search on the heuristic value, first-in first-out
/// among equal values. States with an infinite value are dead ends.
fn best_first(task: &PlanningTask, rel: &Relaxation, budget: &mut Budget) -> Result<Vec<usize>, PlannerError> {
    let Some(h0) = rel.evaluate(task, &task.init).value else {
        return Err(PlannerError::NoSolution);
    };
    let mut nodes = vec![Node { state: task.init.clone(), parent: 0, action: usize::MAX }];
    let mut seen: HashMap<FixedBitSet, ()> = HashMap::from([(task.init.clone(), ())]);
    let mut open = BinaryHeap::from([Reverse((h0, 0usize))]);
    while let Some(Reverse((_, n))) = open.pop() {
        budget.tick()?;
        for a in 0..task.actions.len() {
            if !task.applicable(&nodes[n].state, a) {
                continue;
            }
            let next = task.apply(&nodes[n].state, a);
            if seen.insert(next.clone(), ()).is_some() {
                continue;
            }
            let Some(v) = rel.evaluate(task, &next).value else { continue };
            nodes.push(Node { state: next, parent: n, action: a });
            let id = nodes.len() - 1;
            if v == 0 {
                return Ok(trace(&nodes, id));
            }
            open.push(Reverse((v, id)));
        }
    }
    Err(PlannerError::NoSolution)
}

/// Solves `task`. FF mode runs enforced hill-climbing and falls back to
/// greedy best-first search; optimal mode runs breadth-first search. The
/// returned plan always passes [`validate_plan`].
pub fn plan(task: &PlanningTask, config: &SearchConfig) -> Result<Plan, PlannerError> {
    if task.is_goal(&task.init) {
        return Ok(Plan::default());
    }
    let mut budget = Budget { config, start: Instant::now(), expanded: 0 };
    let indices = match config.mode {
        SearchMode::Optimal => breadth_first(task, &mut budget)?,
        SearchMode::Ff => {
            let rel = Relaxation::new(task);
            match hill_climb(task, &rel, &mut budget)? {
                Some(p) => p,
                None => best_first(task, &rel, &mut budget)?,
            }
        }
    };
    let plan = Plan::new(indices.into_iter().map(|a| task.actions[a].step()).collect());
    debug_assert_eq!(validate_plan(task, &plan), Ok(()));
    Ok(plan)
}
