use fixedbitset::FixedBitSet;

use super::PlanningTask;

const UNREACHED: u32 = u32::MAX;

/// A relaxed-plan estimate. `value` is `None` when the goal is unreachable
/// even ignoring deletes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heuristic {
    pub value: Option<usize>,
    /// Relaxed-plan actions applicable in the evaluated state, ascending.
    pub helpful: Vec<usize>,
}

impl Heuristic {
    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }
}

/// Precomputed fact-to-action tables, shared across evaluations.
pub(crate) struct Relaxation {
    pre_of: Vec<Vec<usize>>,
    achievers: Vec<Vec<usize>>,
    no_pre: Vec<usize>,
}

impl Relaxation {
    pub(crate) fn new(task: &PlanningTask) -> Self {
        let n = task.facts.len();
        let mut pre_of = vec![Vec::new(); n];
        let mut achievers = vec![Vec::new(); n];
        let mut no_pre = Vec::new();
        for (i, a) in task.actions.iter().enumerate() {
            if a.pre.is_empty() {
                no_pre.push(i);
            }
            for &f in &a.pre {
                pre_of[f].push(i);
            }
            for &f in &a.eff_add {
                achievers[f].push(i);
            }
        }
        Relaxation { pre_of, achievers, no_pre }
    }

    /// Builds the delete-free planning graph from `state` and extracts a
    /// relaxed plan backwards. Goals at a layer are taken in index order;
    /// each is achieved by the action of the smallest layer, then the
    /// smallest index (the actions are sorted by name). Facts added by a
    /// chosen action count as achieved at the layer of the goal it was
    /// chosen for. Actions the remaining relaxed plan does not need are then
    /// dropped, latest layer first.
    pub(crate) fn evaluate(&self, task: &PlanningTask, state: &FixedBitSet) -> Heuristic {
        let nf = task.facts.len();
        let na = task.actions.len();
        let mut fact_layer = vec![UNREACHED; nf];
        let mut act_layer = vec![UNREACHED; na];
        let mut waiting: Vec<usize> = task.actions.iter().map(|a| a.pre.len()).collect();
        let mut frontier: Vec<usize> = state.ones().collect();
        for &f in &frontier {
            fact_layer[f] = 0;
        }
        let mut layer = 0u32;
        loop {
            if task.goal.iter().all(|&g| fact_layer[g] != UNREACHED) {
                break;
            }
            let mut ready: Vec<usize> = if layer == 0 { self.no_pre.clone() } else { Vec::new() };
            for &f in &frontier {
                for &a in &self.pre_of[f] {
                    waiting[a] -= 1;
                    if waiting[a] == 0 {
                        ready.push(a);
                    }
                }
            }
            let mut next = Vec::new();
            for &a in &ready {
                act_layer[a] = layer;
                for &f in &task.actions[a].eff_add {
                    if fact_layer[f] == UNREACHED {
                        fact_layer[f] = layer + 1;
                        next.push(f);
                    }
                }
            }
            if next.is_empty() {
                return Heuristic { value: None, helpful: Vec::new() };
            }
            frontier = next;
            layer += 1;
        }

        let top = task.goal.iter().map(|&g| fact_layer[g]).max().unwrap_or(0) as usize;
        let mut goals: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        for &g in &task.goal {
            goals[fact_layer[g] as usize].push(g);
        }
        let mut marked: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(nf); top + 1];
        let mut chosen: Vec<usize> = Vec::new();
        for i in (1..=top).rev() {
            let mut layer_goals = std::mem::take(&mut goals[i]);
            layer_goals.sort_unstable();
            layer_goals.dedup();
            for g in layer_goals {
                if marked[i].contains(g) {
                    continue;
                }
                let a = self.achievers[g]
                    .iter()
                    .copied()
                    .filter(|&a| act_layer[a] < i as u32)
                    .min_by_key(|&a| (act_layer[a], a))
                    .expect("a reached fact has an achiever below it");
                chosen.push(a);
                for &p in &task.actions[a].pre {
                    let l = fact_layer[p] as usize;
                    if l > 0 && !marked[l].contains(p) {
                        goals[l].push(p);
                    }
                }
                for &f in &task.actions[a].eff_add {
                    marked[i].insert(f);
                }
            }
        }
        chosen.sort_unstable_by_key(|&a| (act_layer[a], a));
        chosen.dedup();
        // drop actions the rest of the relaxed plan can do without
        for k in (0..chosen.len()).rev() {
            let a = chosen.remove(k);
            if !self.reaches_goal(task, state, &chosen) {
                chosen.insert(k, a);
            }
        }
        let mut helpful: Vec<usize> = chosen.iter().copied().filter(|&a| act_layer[a] == 0).collect();
        helpful.sort_unstable();
        Heuristic { value: Some(chosen.len()), helpful }
    }

    /// Whether applying `actions` ignoring deletes, in any order, reaches
    /// the goal from `state`.
    fn reaches_goal(&self, task: &PlanningTask, state: &FixedBitSet, actions: &[usize]) -> bool {
        let mut s = state.clone();
        let mut pending: Vec<usize> = actions.to_vec();
        loop {
            let before = pending.len();
            pending.retain(|&a| {
                if task.actions[a].pre.iter().all(|&f| s.contains(f)) {
                    for &f in &task.actions[a].eff_add {
                        s.insert(f);
                    }
                    false
                } else {
                    true
                }
            });
            if pending.len() == before {
                break;
            }
        }
        task.is_goal(&s)
    }
}

/// The FF heuristic of `state`.
pub fn h_ff(state: &FixedBitSet, task: &PlanningTask) -> Heuristic {
    Relaxation::new(task).evaluate(task, state)
}
