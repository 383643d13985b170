use std::collections::BTreeSet;
use std::sync::mpsc;
use std::time::Duration;

use irp_core::demo::{pick_place_script, GraspStyle, SimSettings};
use irp_core::domain::Domain;
use irp_core::execution::*;
use irp_core::inference::{action_from_demo, ActionEdit};
use irp_core::logic::{Atom, Literal};
use irp_core::pddl::PddlProblem;
use irp_core::planner::{ground_task, plan, Plan, PlanStep, SearchConfig};
use irp_core::types::TypeTag;
use irp_core::world::*;

fn cube() -> Dims {
    Dims::new(0.05, 0.05, 0.05)
}

fn abc() -> Scene {
    Scene::new(vec![
        PositionInstance::new("A", 0.5, -0.2),
        PositionInstance::new("B", 0.5, 0.0),
        PositionInstance::new("C", 0.5, 0.2),
    ])
}

fn params() -> PerceptionParams {
    PerceptionParams::default()
}

/// The move action taught by moving one cube from A to B, with the object
/// widened to OBJECT.
fn domain() -> Domain {
    let mut scene = abc();
    scene.place("obj", cube(), TypeTag::cube(), Support::Position("A")).unwrap();
    let demo = pick_place_script("move", &scene, "obj", "B", GraspStyle::ClawTop)
        .unwrap()
        .run(&params(), SimSettings::default())
        .unwrap();
    let mut d = Domain::new("blocks");
    let a = action_from_demo("move", &demo, &d.types).unwrap();
    d.add_action(a, Some(demo.action)).unwrap();
    d.edit_action("move", &ActionEdit::SetParamType { param: "?obj".into(), ty: TypeTag::object() }).unwrap();
    d
}

fn swap_scene() -> Scene {
    let mut s = abc();
    s.place("obj1", cube(), TypeTag::cube(), Support::Position("A")).unwrap();
    s.place("obj2", cube(), TypeTag::cube(), Support::Position("B")).unwrap();
    s
}

fn swap_goal() -> BTreeSet<Literal> {
    [Literal::pos(Atom::on("obj1", "B")), Literal::pos(Atom::on("obj2", "A"))].into()
}

fn solve(d: &Domain, state: &WorldState, goal: BTreeSet<Literal>) -> Plan {
    let p = PddlProblem::from_state("p", &d.name, state, goal);
    let t = ground_task(&d.to_pddl(), &p).unwrap();
    plan(&t, &SearchConfig::optimal()).unwrap()
}

fn step(args: [&str; 3]) -> PlanStep {
    PlanStep { name: "move".into(), args: args.iter().map(|s| s.to_string()).collect() }
}

#[test]
fn swap_plan_runs_to_the_goal() {
    let d = domain();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = swap_scene();
    let model = init_mental_model(&scene, &p, PerceptionMode::Full, &[]).unwrap();
    assert_eq!(model.atoms, perceive(&scene, &p, PerceptionMode::Full));
    let plan = solve(&d, &model.atoms, swap_goal());
    assert_eq!(plan.render(), "1. move(obj1, A, C)\n2. move(obj2, B, A)\n3. move(obj1, C, B)\n");

    let r = ex.execute_plan(&model, &scene, &plan, &swap_goal(), &mut auto_ok).unwrap();
    assert!(r.goal_satisfied);
    let seen = perceive(&r.scene, &p, PerceptionMode::Full);
    assert!(seen.satisfies(&swap_goal()));
    assert_eq!(r.model.atoms, seen);
    assert_eq!(r.log.len(), 3);
    assert!(r.log.entries().iter().all(|e| e.outcome == Outcome::Ok));
    assert_eq!(r.model.dirty, ["obj1".to_string(), "obj2".to_string()].into());
    assert_eq!(ex.replay_log(&scene, &r.log).unwrap(), r.scene);

    let t = r.log.transcript();
    assert!(t.starts_with("1. move(obj1, A, C) [OK]\n"), "{t}");
    assert!(t.contains("added: clear(A), on(obj1, C)"), "{t}");
    let back: ExecutionLog = serde_json::from_str(&r.log.to_json()).unwrap();
    assert_eq!(back, r.log);
    assert!(r.log.to_json().contains("\"outcome\": \"OK\""));
}

#[test]
fn first_step_moves_obj1_to_c() {
    let d = domain();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = swap_scene();
    let model = init_mental_model(&scene, &p, PerceptionMode::Full, &[]).unwrap();
    let r = ex.execute_plan_step(&model, &scene, 0, &step(["obj1", "A", "C"]), &mut auto_ok).unwrap();
    assert_eq!(r.entry.outcome, Outcome::Ok);
    assert!(r.model.atoms.contains(&Atom::on("obj1", "C")));
    assert!(r.model.atoms.contains(&Atom::clear("A")));
    let c = r.scene.position("C").unwrap().point();
    assert!(r.scene.object("obj1").unwrap().pose.horizontal_distance(&c) < 1e-6);
    assert_eq!(r.model.poses["obj1"], r.scene.object("obj1").unwrap().pose);
}

#[test]
fn unsatisfied_precondition_moves_nothing() {
    let d = domain();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = swap_scene();
    let model = init_mental_model(&scene, &p, PerceptionMode::Full, &[]).unwrap();
    let r = ex.execute_plan_step(&model, &scene, 0, &step(["obj1", "B", "C"]), &mut auto_ok);
    assert!(matches!(r, Err(ExecutionError::PreconditionUnsatisfied { step: 1, .. })), "{:?}", r.err());
    let bad = Plan::new(vec![step(["obj2", "B", "A"])]);
    let r = ex.execute_plan(&model, &scene, &bad, &swap_goal(), &mut auto_ok);
    assert!(matches!(r, Err(ExecutionError::PreconditionUnsatisfied { .. })));
}

#[test]
fn rejection_reperceives() {
    let d = domain();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = swap_scene();
    let model = init_mental_model(&scene, &p, PerceptionMode::Full, &[]).unwrap();
    let plan = solve(&d, &model.atoms, swap_goal());
    let mut reject = |_: &PlanStep, _: &Scene| Verdict::Reject;
    let r = ex.execute_plan(&model, &scene, &plan, &swap_goal(), &mut reject).unwrap();
    assert_eq!(r.log.len(), 1);
    assert_eq!(r.log.entries()[0].outcome, Outcome::Rejected);
    assert_eq!(r.model.atoms, perceive(&r.scene, &p, PerceptionMode::Full));
    assert!(!r.goal_satisfied);
}

#[test]
fn empty_plan_changes_nothing() {
    let d = domain();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = swap_scene();
    let model = init_mental_model(&scene, &p, PerceptionMode::Full, &[]).unwrap();
    let r = ex.execute_plan(&model, &scene, &Plan::default(), &swap_goal(), &mut auto_ok).unwrap();
    assert!(r.log.is_empty());
    assert_eq!(r.scene, scene);
    assert_eq!(r.model, model);
}

#[test]
fn stale_pose_fails_the_step() {
    let d = domain();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = swap_scene();
    let model = init_mental_model(&scene, &p, PerceptionMode::Full, &[]).unwrap();
    let mut moved = scene.clone();
    moved.object_mut("obj1").unwrap().pose.y += 0.1;
    let r = ex.execute_plan_step(&model, &moved, 0, &step(["obj1", "A", "C"]), &mut auto_ok).unwrap();
    assert_eq!(r.entry.outcome, Outcome::Failed);
    assert!(r.entry.error.is_some());
    assert_eq!(r.scene, moved);
    assert_eq!(r.model, model);
}

#[test]
fn confirm_channel_times_out_as_reject() {
    let (tx, rx) = mpsc::channel();
    let mut confirm = channel_confirm(rx, Duration::from_millis(20));
    let s = step(["obj1", "A", "C"]);
    tx.send(Verdict::Ok).unwrap();
    assert_eq!(confirm(&s, &Scene::default()), Verdict::Ok);
    assert_eq!(confirm(&s, &Scene::default()), Verdict::Reject);
    drop(tx);
    assert_eq!(confirm(&s, &Scene::default()), Verdict::Reject);
}

fn stacked_scene() -> Scene {
    let mut s = abc();
    s.place("c1", cube(), TypeTag::cube(), Support::Position("A")).unwrap();
    s.place("c2", cube(), TypeTag::cube(), Support::Object("c1")).unwrap();
    s
}

#[test]
fn stack_blind_corrections() {
    let p = params();
    let scene = stacked_scene();
    let fixes = [Correction::Assert(Atom::on("c1", "A")), Correction::Assert(Atom::on("c2", "c1"))];
    let m = init_mental_model(&scene, &p, PerceptionMode::StackBlind, &fixes).unwrap();
    assert!(m.atoms.contains(&Atom::on("c1", "A")));
    assert!(m.atoms.contains(&Atom::on("c2", "c1")));
    assert!(!m.atoms.contains(&Atom::clear("c1")));
    assert_eq!(m.atoms, perceive(&scene, &p, PerceptionMode::Full));

    let mut one = abc();
    one.place("c", cube(), TypeTag::cube(), Support::Position("A")).unwrap();
    let bad = [Correction::Assert(Atom::clear("A")), Correction::Assert(Atom::on("c", "A"))];
    let r = init_mental_model(&one, &p, PerceptionMode::Full, &bad);
    assert!(matches!(r, Err(WorldError::InconsistentCorrection(_))), "{r:?}");
}

#[test]
fn stack_blind_unstacking_reaches_the_goal() {
    let mut d = domain();
    d.edit_action("move", &ActionEdit::SetParamType { param: "?A".into(), ty: TypeTag::element() }).unwrap();
    d.edit_action("move", &ActionEdit::AddPre { literal: Literal::pos(Atom::clear("?obj")) }).unwrap();
    let p = params();
    let ex = Executor { domain: &d, perception: &p, sim: SimSettings::default() };
    let scene = stacked_scene();
    let fixes = [Correction::Assert(Atom::on("c1", "A")), Correction::Assert(Atom::on("c2", "c1"))];
    let model = init_mental_model(&scene, &p, PerceptionMode::StackBlind, &fixes).unwrap();
    let goal: BTreeSet<Literal> = [Literal::pos(Atom::on("c1", "C")), Literal::pos(Atom::on("c2", "B"))].into();
    let plan = solve(&d, &model.atoms, goal.clone());
    assert_eq!(plan.len(), 2);
    let r = ex.execute_plan(&model, &scene, &plan, &goal, &mut auto_ok).unwrap();
    assert!(r.goal_satisfied);
    assert_eq!(r.model.atoms, perceive(&r.scene, &p, PerceptionMode::Full));
}
