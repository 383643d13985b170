use std::path::Path;
use std::process::{Command, Output};

const DOMAIN: &str = "(define (domain irp)
  (:requirements :strips :typing :negative-preconditions)
  (:types position object - element cube - object)
  (:predicates (clear ?x - element) (on ?x - object ?y - element))
  (:action move
    :parameters (?obj - cube ?A - position ?B - position)
    :precondition (and (on ?obj ?A) (clear ?B) (not (on ?obj ?B)) (not (clear ?A)))
    :effect (and (on ?obj ?B) (clear ?A) (not (on ?obj ?A)) (not (clear ?B)))))
";

const SWAP: &str = "(define (problem swap) (:domain irp)
  (:objects obj1 obj2 - cube A B C - position)
  (:init (on obj1 A) (on obj2 B) (clear C))
  (:goal (and (on obj1 B) (on obj2 A))))
";

const STACK: &str = "(define (problem stack) (:domain irp)
  (:objects obj1 obj2 - cube A B C - position)
  (:init (on obj1 A) (on obj2 B) (clear C))
  (:goal (on obj2 obj1)))
";

fn irp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irp"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bench_single_task_succeeds() {
    let o = irp(&["bench", "--task", "1", "--optimal"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("task 1"), "{}", stdout(&o));
    let o = irp(&["bench", "--task", "9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plan_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "domain.pddl", DOMAIN);
    let swap = write(dir.path(), "swap.pddl", SWAP);
    let o = irp(&["plan", "--domain", &d, "--problem", &swap, "--optimal"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.contains("move")).count(), 3, "{text}");

    let stack = write(dir.path(), "stack.pddl", STACK);
    let o = irp(&["plan", "--domain", &d, "--problem", &stack]);
    assert_eq!(o.status.code(), Some(2));

    let broken = write(dir.path(), "broken.pddl", "(define (domain irp) (:action");
    let o = irp(&["plan", "--domain", &broken, "--problem", &swap]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn demo_then_export() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("s.json");
    let session = session.to_str().unwrap();
    let o = irp(&["demo", "--script", "data/demo_move.json", "--session", session]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("after: obj is on B"));

    let out = dir.path().join("out");
    let o = irp(&["export", "--session", session, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let domain = std::fs::read_to_string(out.join("domain.pddl")).unwrap();
    let parsed = irp_core::pddl::parse_domain(&domain).unwrap();
    assert_eq!(parsed.actions.len(), 1);
    assert!(domain.contains("(:action move_cube"));

    let o = irp(&["demo", "--script", "data/demo_move.json", "--session", session]);
    assert_eq!(o.status.code(), Some(1));
}
