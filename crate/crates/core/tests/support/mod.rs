//! Generators and independent oracles shared by the property suites and the
//! acceptance target.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use irp_core::demo::{pick_place_script, GraspStyle, LowLevelAction, SimSettings};
use irp_core::domain::Domain;
use irp_core::inference::{action_from_demo, infer_ground_conditions, lift_action, ActionEdit};
use irp_core::logic::{builtin_predicates, ActionSchema, Atom, Literal, Parameter, PredicateSchema};
use irp_core::pddl::{emit_domain, emit_problem, parse_domain, parse_problem, PddlDomain, PddlProblem, REQUIREMENTS};
use irp_core::planner::{ground_task, h_ff, plan, validate_plan, PlannerError, SearchConfig};
use irp_core::types::{TypeHierarchy, TypeTag};
use irp_core::world::{Dims, PerceptionParams, PositionInstance, Scene, Support, WorldState};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Runs `cases` deterministic cases of `check` over `strategy`.
pub fn run_cases<S: Strategy>(
    cases: u32,
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), String>,
) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, |v| check(v).map_err(TestCaseError::fail)).map_err(|e| e.to_string())
}

fn object_types() -> [TypeTag; 3] {
    [TypeTag::base(), TypeTag::cube(), TypeTag::roof()]
}

// ----- inference -----

/// A before/after observation pair over the same typed instances.
#[derive(Debug, Clone)]
pub struct ObservationPair {
    pub o1: WorldState,
    pub o2: WorldState,
}

/// Every well-typed built-in atom over `objects` and `positions`.
fn atom_universe(objects: &[String], positions: &[String]) -> Vec<Atom> {
    let elements: Vec<&String> = objects.iter().chain(positions).collect();
    let mut out = Vec::new();
    for e in &elements {
        out.push(Atom::clear(e));
    }
    for o in objects {
        out.push(Atom::flat(o));
        out.push(Atom::thin(o));
        for e in &elements {
            if *e != o {
                out.push(Atom::on(o, e));
                out.push(Atom::stackable(o, e));
            }
        }
    }
    out
}

pub fn observation_pairs() -> impl Strategy<Value = ObservationPair> {
    (1..=3usize, 1..=3usize).prop_flat_map(|(n_obj, n_pos)| {
        let objects: Vec<String> = (1..=n_obj).map(|i| format!("obj{i}")).collect();
        let positions: Vec<String> = ["A", "B", "C"][..n_pos].iter().map(|s| s.to_string()).collect();
        let len = atom_universe(&objects, &positions).len();
        (
            Just((objects, positions)),
            proptest::collection::vec(0..3usize, n_obj),
            proptest::collection::vec(any::<bool>(), len),
            proptest::collection::vec(any::<bool>(), len),
        )
            .prop_map(|((objects, positions), tys, in1, in2)| {
                let universe = atom_universe(&objects, &positions);
                let mut instances: BTreeMap<String, TypeTag> =
                    objects.iter().zip(&tys).map(|(o, t)| (o.clone(), object_types()[*t].clone())).collect();
                instances.extend(positions.iter().map(|p| (p.clone(), TypeTag::position())));
                let pick = |mask: &[bool]| -> Vec<Atom> {
                    universe.iter().zip(mask).filter(|(_, m)| **m).map(|(a, _)| a.clone()).collect()
                };
                ObservationPair {
                    o1: WorldState::new(instances.clone(), pick(&in1)),
                    o2: WorldState::new(instances, pick(&in2)),
                }
            })
    })
}

/// Inferred conditions match set differences computed here, hold before,
/// turn O1 into O2, and survive lifting and regrounding.
pub fn check_inference(pair: ObservationPair) -> Result<(), String> {
    let ObservationPair { o1, o2 } = pair;
    let g = infer_ground_conditions(&o1, &o2).map_err(|e| e.to_string())?;
    let minus: BTreeSet<Atom> = o1.atoms.iter().filter(|a| !o2.atoms.contains(*a)).cloned().collect();
    let plus: BTreeSet<Atom> = o2.atoms.iter().filter(|a| !o1.atoms.contains(*a)).cloned().collect();
    if g.eff_minus != minus || g.eff_plus != plus {
        return Err(format!("effects {:?} / {:?}", g.eff_plus, g.eff_minus));
    }
    for l in &g.pre {
        if o1.atoms.contains(&l.atom) != l.positive {
            return Err(format!("precondition {l} does not hold before"));
        }
    }
    if !o1.satisfies(&g.pre) {
        return Err("satisfies disagrees".into());
    }
    let mut manual = o1.atoms.clone();
    manual.retain(|a| !g.eff_minus.contains(a));
    manual.extend(g.eff_plus.iter().cloned());
    if manual != o2.atoms {
        return Err("manual application does not give O2".into());
    }
    let applied = o1.apply_effects(&g.eff_plus, &g.eff_minus).map_err(|e| e.to_string())?;
    if applied.atoms != o2.atoms {
        return Err("apply_effects does not give O2".into());
    }
    let ll = LowLevelAction { name: "demo".into(), keyframes: Vec::new() };
    let lifted = lift_action("act", &g, &o1.instances, &TypeHierarchy::builtin(), &ll).map_err(|e| e.to_string())?;
    let args: Vec<String> = lifted.params.iter().map(|p| lifted.origins[&p.name].instance.clone()).collect();
    for (p, a) in lifted.params.iter().zip(&args) {
        if o1.instances[a] != p.ty {
            return Err(format!("{} lifted to type {}", a, p.ty));
        }
    }
    if BTreeSet::from_iter(&args).len() != args.len() {
        return Err("two parameters bound to one instance".into());
    }
    if lifted.ground(&args) != g {
        return Err("regrounding the lifted action changes it".into());
    }
    Ok(())
}

pub fn inference_suite(cases: u32) -> Result<(), String> {
    run_cases(cases, observation_pairs(), check_inference)
}

// ----- PDDL -----

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> Option<&'a T> {
    items.choose(rng)
}

fn random_types(rng: &mut ChaCha8Rng) -> TypeHierarchy {
    if rng.random_bool(0.5) {
        return TypeHierarchy::builtin();
    }
    let mut h = TypeHierarchy::empty();
    let mut names: Vec<TypeTag> = Vec::new();
    for i in 0..rng.random_range(0..=5) {
        let t = TypeTag::new(format!("t{i}"));
        let parent = if rng.random_bool(0.6) { pick(rng, &names).cloned() } else { None };
        h.declare(t.clone(), parent).expect("parents are declared first");
        names.push(t);
    }
    h
}

fn compatible<'a>(params: &'a [Parameter], ty: &TypeTag, types: &TypeHierarchy) -> Vec<&'a Parameter> {
    params.iter().filter(|p| types.is_subtype(&p.ty, ty)).collect()
}

/// A random well-typed atom of `pred` over `params`, if every slot has a
/// compatible parameter.
fn random_lifted_atom(
    rng: &mut ChaCha8Rng,
    pred: &PredicateSchema,
    params: &[Parameter],
    types: &TypeHierarchy,
) -> Option<Atom> {
    let mut args = Vec::new();
    for ty in &pred.params {
        args.push(pick(rng, &compatible(params, ty, types))?.name.clone());
    }
    Some(Atom::new(&pred.name, args))
}

fn random_action(rng: &mut ChaCha8Rng, name: String, d: &PddlDomain) -> ActionSchema {
    let types: Vec<TypeTag> = d.types.iter().cloned().collect();
    let mut params = Vec::new();
    if !types.is_empty() {
        for i in 0..rng.random_range(0..=3) {
            let var = match rng.random_range(0..3) {
                0 => format!("?v{i}"),
                1 => format!("?{}", (b'A' + i as u8) as char),
                _ => format!("?obj{i}"),
            };
            params.push(Parameter::new(&var, pick(rng, &types).cloned().expect("types are not empty")));
        }
    }
    let mut a = ActionSchema { name, params, pre: BTreeSet::new(), add: BTreeSet::new(), del: BTreeSet::new() };
    if d.predicates.is_empty() {
        return a;
    }
    for _ in 0..rng.random_range(0..=5) {
        let pred = pick(rng, &d.predicates).expect("predicates are not empty");
        let Some(atom) = random_lifted_atom(rng, pred, &a.params, &d.types) else { continue };
        let lit = if rng.random_bool(0.3) { Literal::neg(atom) } else { Literal::pos(atom) };
        if !a.pre.contains(&lit.negated()) {
            a.pre.insert(lit);
        }
    }
    for _ in 0..rng.random_range(0..=4) {
        let pred = pick(rng, &d.predicates).expect("predicates are not empty");
        let Some(atom) = random_lifted_atom(rng, pred, &a.params, &d.types) else { continue };
        if rng.random_bool(0.5) {
            if !a.del.contains(&atom) {
                a.add.insert(atom);
            }
        } else if !a.add.contains(&atom) {
            a.del.insert(atom);
        }
    }
    a
}

pub fn random_domain(rng: &mut ChaCha8Rng) -> PddlDomain {
    let types = random_types(rng);
    let type_list: Vec<TypeTag> = types.iter().cloned().collect();
    let mut predicates = if types == TypeHierarchy::builtin() && rng.random_bool(0.7) {
        builtin_predicates()
    } else {
        Vec::new()
    };
    for i in 0..rng.random_range(0..=4) {
        let arity = if type_list.is_empty() { 0 } else { rng.random_range(0..=3) };
        let params = (0..arity).map(|_| pick(rng, &type_list).cloned().expect("types are not empty")).collect();
        predicates.push(PredicateSchema::new(&format!("p{i}_{}", rng.random_range(0..100)), params));
    }
    let requirements = REQUIREMENTS.iter().filter(|_| rng.random_bool(0.7)).map(|r| r.to_string()).collect();
    let mut d = PddlDomain {
        name: format!("dom-{}", rng.random_range(0..10_000)),
        requirements,
        types,
        predicates,
        actions: Vec::new(),
    };
    for i in 0..rng.random_range(0..=3) {
        let name = format!("act{i}-{}", rng.random_range(0..100));
        let a = random_action(rng, name, &d);
        d.actions.push(a);
    }
    d
}

pub fn random_problem(rng: &mut ChaCha8Rng, d: &PddlDomain) -> PddlProblem {
    let types: Vec<TypeTag> = d.types.iter().cloned().collect();
    let names = ["A", "B", "C", "obj1", "obj_2", "x-3", "Cube4", "roof"];
    let mut objects = BTreeMap::new();
    let kept: Vec<&str> = names.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    for n in kept {
        let ty = pick(rng, &types).cloned().unwrap_or_else(|| TypeTag::new("thing"));
        objects.insert(n.to_string(), ty);
    }
    let ids: Vec<String> = objects.keys().cloned().collect();
    let random_atom = |rng: &mut ChaCha8Rng| -> Option<Atom> {
        let pred = pick(rng, &d.predicates)?;
        let mut args = Vec::new();
        for _ in &pred.params {
            args.push(pick(rng, &ids)?.clone());
        }
        Some(Atom::new(&pred.name, args))
    };
    let mut init = BTreeSet::new();
    for _ in 0..rng.random_range(0..=8) {
        init.extend(random_atom(rng));
    }
    let mut goal = BTreeSet::new();
    for _ in 0..rng.random_range(0..=4) {
        if let Some(a) = random_atom(rng) {
            goal.insert(if rng.random_bool(0.3) { Literal::neg(a) } else { Literal::pos(a) });
        }
    }
    PddlProblem { name: format!("prob{}", rng.random_range(0..1000)), domain_name: d.name.clone(), objects, init, goal }
}

/// parse ∘ emit is the identity and emit ∘ parse ∘ emit equals emit, for
/// the domain and the problem generated from `seed`.
pub fn check_pddl_seed(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = random_domain(&mut rng);
    d.validate().map_err(|e| format!("generated domain is invalid: {e}"))?;
    let p = random_problem(&mut rng, &d);
    let text = emit_domain(&d);
    let back = parse_domain(&text).map_err(|e| format!("{e} in\n{text}"))?;
    if back != d {
        return Err(format!("domain changed:\n{text}\n{back:?}\n{d:?}"));
    }
    if emit_domain(&back) != text {
        return Err(format!("domain text changed:\n{text}"));
    }
    let text = emit_problem(&p);
    let back = parse_problem(&text).map_err(|e| format!("{e} in\n{text}"))?;
    if back != p {
        return Err(format!("problem changed:\n{text}"));
    }
    if emit_problem(&back) != text {
        return Err(format!("problem text changed:\n{text}"));
    }
    Ok(())
}

pub fn pddl_suite(cases: u32) -> Result<(), String> {
    run_cases(cases, any::<u64>(), check_pddl_seed)
}

// ----- planning -----

/// Taught move actions: one real demonstration, then the condition edits
/// the benchmark tasks use, each under its own name.
pub fn taught_actions() -> Vec<ActionSchema> {
    let mut scene = Scene::new(vec![
        PositionInstance::new("A", 0.5, -0.2),
        PositionInstance::new("B", 0.5, 0.0),
        PositionInstance::new("C", 0.5, 0.2),
    ]);
    scene.place("obj", Dims::new(0.05, 0.05, 0.05), TypeTag::cube(), Support::Position("A")).expect("empty scene");
    let demo = pick_place_script("move", &scene, "obj", "B", GraspStyle::ClawTop)
        .expect("script")
        .run(&PerceptionParams::default(), SimSettings::default())
        .expect("demo runs");
    let mut d = Domain::new("taught");
    let a = action_from_demo("move", &demo, &d.types).expect("inference");
    d.add_action(a, Some(demo.action)).expect("fresh domain");

    let widen = vec![
        ActionEdit::SetParamType { param: "?obj".into(), ty: TypeTag::object() },
        ActionEdit::SetParamType { param: "?A".into(), ty: TypeTag::element() },
        ActionEdit::SetParamType { param: "?B".into(), ty: TypeTag::element() },
    ];
    let clear = ActionEdit::AddPre { literal: Literal::pos(Atom::clear("?obj")) };
    let stackable = ActionEdit::AddPre { literal: Literal::pos(Atom::stackable("?obj", "?B")) };
    let variants: Vec<(&str, Vec<ActionEdit>)> = vec![
        ("move_object", vec![ActionEdit::SetParamType { param: "?obj".into(), ty: TypeTag::object() }]),
        ("claw_top", [widen.clone(), vec![clear.clone()]].concat()),
        ("claw_side", widen.clone()),
        (
            "claw_thin",
            [
                widen.clone(),
                vec![clear.clone(), ActionEdit::AddPre { literal: Literal::pos(Atom::thin("?obj")) }, stackable.clone()],
            ]
            .concat(),
        ),
        (
            "suction_flat",
            [widen, vec![clear, ActionEdit::AddPre { literal: Literal::pos(Atom::flat("?obj")) }, stackable]].concat(),
        ),
    ];
    for (name, edits) in variants {
        d.copy_action("move", name).expect("copy");
        for e in &edits {
            d.edit_action(name, e).expect("edit");
        }
    }
    d.to_pddl().actions
}

/// A random tabletop problem with up to four objects and four positions.
/// Objects are stacked at random; the goal has one to three literals.
pub fn random_task(seed: u64, taught: &[ActionSchema]) -> (PddlDomain, PddlProblem) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut d = PddlDomain::builtin("tabletop");
    let mut chosen: Vec<ActionSchema> = taught.iter().filter(|_| rng.random_bool(0.4)).cloned().collect();
    if chosen.is_empty() {
        chosen.push(pick(&mut rng, taught).cloned().expect("taught actions"));
    }
    d.actions = chosen;

    let positions: Vec<String> = ["A", "B", "C", "D"][..rng.random_range(2..=4)].iter().map(|s| s.to_string()).collect();
    let mut objects: BTreeMap<String, TypeTag> = positions.iter().map(|p| (p.clone(), TypeTag::position())).collect();
    let mut tops: BTreeMap<String, String> = positions.iter().map(|p| (p.clone(), p.clone())).collect();
    let mut init = BTreeSet::new();
    let mut objs = Vec::new();
    for i in 1..=rng.random_range(1..=4) {
        let ty = pick(&mut rng, &object_types()).cloned().expect("types");
        let id = format!("{ty}{i}");
        let pos = pick(&mut rng, &positions).expect("positions").clone();
        let under = tops.insert(pos, id.clone()).expect("every position has a top");
        init.insert(Atom::on(&id, &under));
        objects.insert(id.clone(), ty);
        objs.push(id);
    }
    for top in tops.values() {
        init.insert(Atom::clear(top));
    }
    for o in &objs {
        let ty = &objects[o];
        if *ty != TypeTag::roof() {
            init.insert(Atom::flat(o));
        }
        if *ty != TypeTag::base() {
            init.insert(Atom::thin(o));
        }
        for (e, ety) in &objects {
            let ok = *ety == TypeTag::position()
                || (*ty == TypeTag::cube() && (*ety == TypeTag::base() || *ety == TypeTag::cube()))
                || (*ty == TypeTag::roof() && *ety == TypeTag::cube());
            if ok && e != o {
                init.insert(Atom::stackable(o, e));
            }
        }
    }
    let elements: Vec<String> = objects.keys().cloned().collect();
    let mut goal = BTreeSet::new();
    if rng.random_bool(0.3) {
        let mut order = objs.clone();
        order.shuffle(&mut rng);
        goal.insert(Literal::pos(Atom::on(&order[0], pick(&mut rng, &positions).expect("positions"))));
        goal.extend(order.windows(2).map(|w| Literal::pos(Atom::on(&w[1], &w[0]))));
    }
    for _ in 0..rng.random_range(0..=2) {
        let atom = if rng.random_bool(0.8) {
            let o = pick(&mut rng, &objs).expect("objects").clone();
            let e = pick(&mut rng, &elements).expect("elements").clone();
            if o == e {
                continue;
            }
            Atom::on(&o, &e)
        } else {
            Atom::clear(pick(&mut rng, &elements).expect("elements"))
        };
        goal.insert(if rng.random_bool(0.15) { Literal::neg(atom) } else { Literal::pos(atom) });
    }
    if goal.is_empty() {
        goal.insert(Literal::pos(Atom::on(&objs[0], &positions[0])));
    }
    let p = PddlProblem { name: format!("task{seed}"), domain_name: d.name.clone(), objects, init, goal };
    (d, p)
}

fn is_subtype(d: &PddlDomain, ty: &TypeTag, ancestor: &TypeTag) -> bool {
    let mut t = Some(ty);
    while let Some(x) = t {
        if x == ancestor {
            return true;
        }
        t = d.types.parent(x);
    }
    false
}

fn holds(state: &BTreeSet<Atom>, lits: &BTreeSet<Literal>) -> bool {
    lits.iter().all(|l| state.contains(&l.atom) == l.positive)
}

type Step = (String, Vec<String>);

/// Ground instances of every action, built by plain enumeration.
fn enumerate(d: &PddlDomain, p: &PddlProblem) -> Vec<(Step, BTreeSet<Literal>, BTreeSet<Atom>, BTreeSet<Atom>)> {
    let mut out = Vec::new();
    for a in &d.actions {
        let mut tuples: Vec<Vec<String>> = vec![Vec::new()];
        for param in &a.params {
            let fits: Vec<&String> = p.objects.iter().filter(|(_, t)| is_subtype(d, t, &param.ty)).map(|(o, _)| o).collect();
            tuples = tuples
                .into_iter()
                .flat_map(|t| fits.iter().map(move |o| [t.clone(), vec![(*o).clone()]].concat()))
                .collect();
        }
        for args in tuples {
            let map: BTreeMap<String, String> = a.params.iter().map(|x| x.name.clone()).zip(args.iter().cloned()).collect();
            let sub = |x: &Atom| Atom::new(&x.predicate, x.args.iter().map(|v| map.get(v).cloned().unwrap_or(v.clone())));
            let pre = a.pre.iter().map(|l| Literal { positive: l.positive, atom: sub(&l.atom) }).collect();
            out.push(((a.name.clone(), args), pre, a.add.iter().map(sub).collect(), a.del.iter().map(sub).collect()));
        }
    }
    out
}

fn successor(state: &BTreeSet<Atom>, add: &BTreeSet<Atom>, del: &BTreeSet<Atom>) -> BTreeSet<Atom> {
    let mut next: BTreeSet<Atom> = state.difference(del).cloned().collect();
    next.extend(add.iter().cloned());
    next
}

/// Shortest plan by breadth-first search over lifted-then-enumerated
/// actions, or `None` when the goal is unreachable.
pub fn lifted_bfs(d: &PddlDomain, p: &PddlProblem) -> Option<Vec<Step>> {
    let actions = enumerate(d, p);
    let start = p.init.clone();
    let mut parent: HashMap<BTreeSet<Atom>, Option<(BTreeSet<Atom>, usize)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        if holds(&s, &p.goal) {
            let mut steps = Vec::new();
            let mut cur = s;
            while let Some(Some((prev, a))) = parent.get(&cur).cloned() {
                steps.push(actions[a].0.clone());
                cur = prev;
            }
            steps.reverse();
            return Some(steps);
        }
        for (i, (_, pre, add, del)) in actions.iter().enumerate() {
            if holds(&s, pre) {
                let next = successor(&s, add, del);
                if !parent.contains_key(&next) {
                    parent.insert(next.clone(), Some((s.clone(), i)));
                    queue.push_back(next);
                }
            }
        }
    }
    None
}

/// Replays `steps` from the initial state; returns the states visited.
pub fn simulate(d: &PddlDomain, p: &PddlProblem, steps: &[Step]) -> Result<Vec<BTreeSet<Atom>>, String> {
    let actions = enumerate(d, p);
    let mut states = vec![p.init.clone()];
    for (i, step) in steps.iter().enumerate() {
        let (_, pre, add, del) =
            actions.iter().find(|(s, ..)| s == step).ok_or_else(|| format!("step {} is not an action", i + 1))?;
        let s = states.last().expect("non-empty");
        if !holds(s, pre) {
            return Err(format!("step {} is not applicable", i + 1));
        }
        states.push(successor(s, add, del));
    }
    if !holds(states.last().expect("non-empty"), &p.goal) {
        return Err("the plan does not reach the goal".into());
    }
    Ok(states)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct PlannerStats {
    pub solvable: usize,
    pub unsolvable: usize,
    pub longest: usize,
}

/// OPTIMAL matches the oracle length, FF is valid and within twice the
/// optimum, h_ff is zero exactly on goal states along the optimal path,
/// and an infinite estimate only occurs when the oracle finds no plan.
pub fn check_planner_task(d: &PddlDomain, p: &PddlProblem, stats: &mut PlannerStats) -> Result<(), String> {
    let task = ground_task(d, p).map_err(|e| e.to_string())?;
    let oracle = lifted_bfs(d, p);
    let optimal = plan(&task, &SearchConfig::optimal());
    let ff = plan(&task, &SearchConfig::ff());
    let h0 = h_ff(&task.init, &task);
    if (h0.value == Some(0)) != holds(&p.init, &p.goal) {
        return Err(format!("h_ff(init) = {:?} disagrees with the goal test", h0.value));
    }
    let Some(best) = oracle else {
        stats.unsolvable += 1;
        if !matches!(optimal, Err(PlannerError::NoSolution)) || !matches!(ff, Err(PlannerError::NoSolution)) {
            return Err(format!("oracle finds no plan, planner gives {optimal:?} / {ff:?}"));
        }
        return Ok(());
    };
    stats.solvable += 1;
    stats.longest = stats.longest.max(best.len());
    if h0.is_infinite() {
        return Err("h_ff is infinite on a solvable task".into());
    }
    let optimal = optimal.map_err(|e| format!("optimal search failed: {e}"))?;
    let ff = ff.map_err(|e| format!("ff search failed: {e}"))?;
    let steps = |pl: &irp_core::planner::Plan| -> Vec<Step> { pl.steps.iter().map(|s| (s.name.clone(), s.args.clone())).collect() };
    if optimal.len() != best.len() {
        return Err(format!("optimal length {} but the oracle needs {}", optimal.len(), best.len()));
    }
    simulate(d, p, &steps(&optimal))?;
    validate_plan(&task, &optimal).map_err(|e| e.to_string())?;
    simulate(d, p, &steps(&ff)).map_err(|e| format!("ff plan: {e}"))?;
    validate_plan(&task, &ff).map_err(|e| e.to_string())?;
    if ff.len() > 2 * best.len() {
        return Err(format!("ff length {} exceeds twice the optimum {}", ff.len(), best.len()));
    }
    let mut state = task.init.clone();
    let visited = simulate(d, p, &best)?;
    for (i, atoms) in visited.iter().enumerate() {
        let h = h_ff(&state, &task);
        if (h.value == Some(0)) != holds(atoms, &p.goal) {
            return Err(format!("h_ff = {:?} after {i} steps disagrees with the goal test", h.value));
        }
        if h.is_infinite() {
            return Err(format!("h_ff is infinite {i} steps along a plan"));
        }
        if let Some((name, args)) = best.get(i) {
            let a = task.find_action(name, args).ok_or_else(|| format!("{name}{args:?} was not grounded"))?;
            state = task.apply(&state, a);
        }
    }
    Ok(())
}

pub fn planner_suite(cases: u32) -> Result<PlannerStats, String> {
    let taught = taught_actions();
    let stats = std::cell::RefCell::new(PlannerStats::default());
    run_cases(cases, any::<u64>(), |seed| {
        let (d, p) = random_task(seed, &taught);
        check_planner_task(&d, &p, &mut stats.borrow_mut()).map_err(|e| format!("{e}\n{}", emit_problem(&p)))
    })?;
    Ok(stats.into_inner())
}
