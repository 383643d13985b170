use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use fixedbitset::FixedBitSet;

use super::{GroundAction, PlannerError, PlanningTask};
use crate::logic::{Atom, Literal, Parameter};
use crate::pddl::{PddlDomain, PddlProblem};
use crate::types::{TypeHierarchy, TypeTag};

/// Every argument tuple whose objects are subtypes of the parameter types,
/// in lexicographic order of object names.
pub fn substitutions(params: &[Parameter], objects: &BTreeMap<String, TypeTag>, types: &TypeHierarchy) -> Vec<Vec<String>> {
    let candidates: Vec<Vec<&String>> = params
        .iter()
        .map(|p| objects.iter().filter(|(_, t)| types.is_subtype(t, &p.ty)).map(|(o, _)| o).collect())
        .collect();
    let mut out = vec![Vec::new()];
    for c in &candidates {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for o in c {
                let mut v: Vec<String> = prefix.clone();
                v.push((*o).clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

struct Candidate {
    name: String,
    args: Vec<String>,
    pre_pos: BTreeSet<Atom>,
    pre_neg: BTreeSet<Atom>,
    add: BTreeSet<Atom>,
    del: BTreeSet<Atom>,
}

/// Instantiates every action over the problem's objects.
///
/// Instances requiring an atom both true and false are dropped, as are
/// instances needing a static atom (one no action changes) with the wrong
/// initial value. An atom both added and deleted by the same instance is
/// added, as in PDDL. Instances with identical conditions and effects are
/// kept once, the first in name order.
pub fn ground_task(domain: &PddlDomain, problem: &PddlProblem) -> Result<PlanningTask, PlannerError> {
    problem.check_against(domain)?;
    let changing: HashSet<&str> = domain
        .actions
        .iter()
        .flat_map(|a| a.add.iter().chain(&a.del))
        .map(|a| a.predicate.as_str())
        .collect();
    let is_static = |a: &Atom| !changing.contains(a.predicate.as_str());

    let mut candidates = Vec::new();
    for schema in &domain.actions {
        for args in substitutions(&schema.params, &problem.objects, &domain.types) {
            let s: BTreeMap<String, String> = schema.params.iter().map(|p| p.name.clone()).zip(args.iter().cloned()).collect();
            let mut c = Candidate {
                name: schema.name.clone(),
                args,
                pre_pos: BTreeSet::new(),
                pre_neg: BTreeSet::new(),
                add: schema.add.iter().map(|a| a.substitute(&s)).collect(),
                del: BTreeSet::new(),
            };
            for l in &schema.pre {
                let a = l.atom.substitute(&s);
                if l.positive {
                    c.pre_pos.insert(a);
                } else {
                    c.pre_neg.insert(a);
                }
            }
            c.del = schema.del.iter().map(|a| a.substitute(&s)).filter(|a| !c.add.contains(a)).collect();
            if c.pre_pos.intersection(&c.pre_neg).next().is_some() {
                continue;
            }
            let static_ok = c.pre_pos.iter().filter(|a| is_static(a)).all(|a| problem.init.contains(a))
                && c.pre_neg.iter().filter(|a| is_static(a)).all(|a| !problem.init.contains(a));
            if static_ok {
                candidates.push(c);
            }
        }
    }
    candidates.sort_by(|a, b| (&a.name, &a.args).cmp(&(&b.name, &b.args)));
    let mut seen = HashSet::new();
    candidates.retain(|c| seen.insert((c.pre_pos.clone(), c.pre_neg.clone(), c.add.clone(), c.del.clone())));

    let mut facts: BTreeSet<Literal> = BTreeSet::new();
    for a in problem.init.iter().chain(problem.goal.iter().map(|l| &l.atom)) {
        facts.insert(Literal::pos(a.clone()));
    }
    for l in problem.goal.iter().filter(|l| !l.positive) {
        facts.insert(l.clone());
    }
    for c in &candidates {
        for a in c.pre_pos.iter().chain(&c.pre_neg).chain(&c.add).chain(&c.del) {
            facts.insert(Literal::pos(a.clone()));
        }
        facts.extend(c.pre_neg.iter().map(|a| Literal::neg(a.clone())));
    }
    let facts: Vec<Literal> = facts.into_iter().collect();
    let index: HashMap<Literal, usize> = facts.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    let complement: Vec<Option<usize>> = facts.iter().map(|l| index.get(&l.negated()).copied()).collect();
    let pos = |a: &Atom| index[&Literal::pos(a.clone())];

    let actions = candidates
        .into_iter()
        .map(|c| {
            let pre_pos: Vec<usize> = c.pre_pos.iter().map(pos).collect();
            let pre_neg: Vec<usize> = c.pre_neg.iter().map(pos).collect();
            let add: Vec<usize> = c.add.iter().map(pos).collect();
            let del: Vec<usize> = c.del.iter().map(pos).collect();
            let mut pre = pre_pos.clone();
            pre.extend(pre_neg.iter().map(|&f| complement[f].expect("negative precondition fact exists")));
            let mut eff_add = add.clone();
            eff_add.extend(del.iter().filter_map(|&f| complement[f]));
            let mut eff_del = del.clone();
            eff_del.extend(add.iter().filter_map(|&f| complement[f]));
            for v in [&mut pre, &mut eff_add, &mut eff_del] {
                v.sort_unstable();
            }
            GroundAction { name: c.name, args: c.args, pre_pos, pre_neg, add, del, pre, eff_add, eff_del }
        })
        .collect();

    let n = facts.len();
    let mut init = FixedBitSet::with_capacity(n);
    let mut goal_pos = FixedBitSet::with_capacity(n);
    let mut goal_neg = FixedBitSet::with_capacity(n);
    for (i, l) in facts.iter().enumerate() {
        if problem.init.contains(&l.atom) == l.positive {
            init.insert(i);
        }
    }
    let mut goal = Vec::new();
    for l in &problem.goal {
        let p = pos(&l.atom);
        if l.positive {
            goal_pos.insert(p);
            goal.push(p);
        } else {
            goal_neg.insert(p);
            goal.push(index[l]);
        }
    }
    goal.sort_unstable();
    Ok(PlanningTask { facts, index, complement, actions, init, goal_pos, goal_neg, goal, objects: problem.objects.clone() })
}
