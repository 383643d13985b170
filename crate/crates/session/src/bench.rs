//! The six benchmark tasks, run headlessly: scripted teaching, condition
//! edits, planning and simulated execution.

use std::collections::BTreeSet;

use irp_core::demo::{pick_place_script, GraspStyle};
use irp_core::execution::auto_ok;
use irp_core::inference::ActionEdit;
use irp_core::logic::{Atom, Literal};
use irp_core::planner::SearchMode;
use irp_core::types::TypeTag;
use irp_core::world::{Scene, Support};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::{PlanStatus, ProblemSource, Session, SessionError};

pub const TASKS: [(u8, &str); 6] = [
    (1, "build a tower of 3 cubes"),
    (2, "build a tower of 4 cubes"),
    (3, "rebuild the tower of task 2 on another position"),
    (4, "build a tower and move it without taking it apart"),
    (5, "build a house of base, cube and roof"),
    (6, "rebuild the house of task 5 on another position"),
];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no benchmark task {0}")]
    UnknownTask(u8),
    #[error("task {task}, {stage}: {source}")]
    Stage {
        task: u8,
        stage: &'static str,
        #[source]
        source: SessionError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseReport {
    pub problem: String,
    /// Run only to set up the task it precedes.
    pub prerequisite: bool,
    pub initial_from_model: bool,
    pub goal: Vec<String>,
    pub plan: Vec<String>,
    pub actions_used: BTreeSet<String>,
    /// The believed state at the end satisfies the goal.
    pub goal_satisfied: bool,
    /// Perceiving the final scene satisfies the goal.
    pub perceived_goal: bool,
    /// The final belief equals what perception sees.
    pub model_matches_scene: bool,
    pub final_state: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: u8,
    pub title: String,
    pub mode: SearchMode,
    pub actions: Vec<String>,
    pub phases: Vec<PhaseReport>,
    /// Total steps of the task's own phases.
    pub plan_length: usize,
    pub success: bool,
}

const CLAW_TOP: &str = "claw_top";
const CLAW_SIDE: &str = "claw_side";
const SUCTION_TOP: &str = "suction_top";

fn stage(task: u8, stage: &'static str) -> impl FnOnce(SessionError) -> BenchError {
    move |source| BenchError::Stage {
        task,
        stage,
        source,
    }
}

fn on(x: &str, y: &str) -> Literal {
    Literal::pos(Atom::on(x, y))
}

fn tower(ids: &[&str], base: Option<&str>) -> BTreeSet<Literal> {
    let mut goal: BTreeSet<Literal> = ids.windows(2).map(|w| on(w[1], w[0])).collect();
    if let Some(b) = base {
        goal.insert(on(ids[0], b));
    }
    goal
}

/// Teaches one pick-and-place action by moving a cube from A to B, then
/// applies the condition edits the task family needs.
fn teach(s: &mut Session, task: u8, style: GraspStyle, house: bool) -> Result<String, BenchError> {
    let name = match style {
        GraspStyle::ClawTop => CLAW_TOP,
        GraspStyle::ClawSide => CLAW_SIDE,
        GraspStyle::SuctionTop => SUCTION_TOP,
    };
    let mut scene = Scene::tabletop();
    let cube = s
        .config
        .prototypes
        .prototype(&TypeTag::cube())
        .expect("cube prototype")
        .dims;
    scene
        .place("obj", cube, TypeTag::cube(), Support::Position("A"))
        .map_err(|e| stage(task, "scene")(e.into()))?;
    let script = pick_place_script(name, &scene, "obj", "B", style)
        .map_err(|e| stage(task, "teach")(e.into()))?;
    s.teach(&script).map_err(stage(task, "teach"))?;

    let mut edits = vec![
        ActionEdit::SetParamType {
            param: "?obj".into(),
            ty: TypeTag::object(),
        },
        ActionEdit::SetParamType {
            param: "?A".into(),
            ty: TypeTag::element(),
        },
        ActionEdit::SetParamType {
            param: "?B".into(),
            ty: TypeTag::element(),
        },
    ];
    if style != GraspStyle::ClawSide {
        edits.push(ActionEdit::AddPre {
            literal: Literal::pos(Atom::clear("?obj")),
        });
    }
    if house {
        let grip = if style == GraspStyle::SuctionTop {
            Atom::flat("?obj")
        } else {
            Atom::thin("?obj")
        };
        edits.push(ActionEdit::AddPre {
            literal: Literal::pos(grip),
        });
        edits.push(ActionEdit::AddPre {
            literal: Literal::pos(Atom::stackable("?obj", "?B")),
        });
    }
    for e in &edits {
        s.edit_action(name, e).map_err(stage(task, "edit"))?;
    }
    Ok(name.to_string())
}

fn set_scene(
    s: &mut Session,
    task: u8,
    objects: &[(&str, TypeTag, &str)],
) -> Result<(), BenchError> {
    let mut scene = Scene::tabletop();
    for (id, ty, pos) in objects {
        let dims = s
            .config
            .prototypes
            .prototype(ty)
            .expect("prototype exists")
            .dims;
        scene
            .place(id, dims, ty.clone(), Support::Position(pos))
            .map_err(|e| stage(task, "scene")(e.into()))?;
    }
    s.set_scene(scene).map_err(stage(task, "scene"))
}

fn cubes(n: usize) -> Vec<(String, TypeTag, &'static str)> {
    ["A", "B", "C", "D"]
        .iter()
        .take(n)
        .enumerate()
        .map(|(i, p)| (format!("cube{}", i + 1), TypeTag::cube(), *p))
        .collect()
}

fn place_cubes(s: &mut Session, task: u8, n: usize) -> Result<(), BenchError> {
    let c = cubes(n);
    let objs: Vec<(&str, TypeTag, &str)> = c
        .iter()
        .map(|(id, t, p)| (id.as_str(), t.clone(), *p))
        .collect();
    set_scene(s, task, &objs)
}

/// Creates, solves and executes one problem with every step confirmed.
fn phase(
    s: &mut Session,
    task: u8,
    name: &str,
    goal: BTreeSet<Literal>,
    source: ProblemSource,
    mode: SearchMode,
    prerequisite: bool,
) -> Result<PhaseReport, BenchError> {
    let initial_from_model = source == ProblemSource::MentalModel;
    s.create_problem(name, goal.clone(), source)
        .map_err(stage(task, "problem"))?;
    let id = s.solve(name, mode).map_err(stage(task, "solve"))?;
    let plan = s.plan(id).map_err(stage(task, "solve"))?.plan.clone();
    s.execute_plan(id, &mut auto_ok)
        .map_err(stage(task, "execute"))?;
    let goal_satisfied = matches!(
        s.plan(id).map_err(stage(task, "execute"))?.status,
        PlanStatus::Finished {
            goal_satisfied: true
        }
    );
    let seen = s.perceived();
    let model_matches_scene = s.model.as_ref().is_some_and(|m| m.atoms == seen);
    Ok(PhaseReport {
        problem: name.to_string(),
        prerequisite,
        initial_from_model,
        goal: goal.iter().map(|l| l.to_string()).collect(),
        plan: plan.steps.iter().map(|p| p.to_string()).collect(),
        actions_used: plan.steps.iter().map(|p| p.name.clone()).collect(),
        goal_satisfied,
        perceived_goal: seen.satisfies(&goal),
        model_matches_scene,
        final_state: seen.atoms.iter().map(|a| a.to_string()).collect(),
    })
}

fn fresh(
    task: u8,
    styles: &[GraspStyle],
    house: bool,
) -> Result<(Session, Vec<String>), BenchError> {
    let mut s = Session::default();
    let mut names = Vec::new();
    for &st in styles {
        names.push(teach(&mut s, task, st, house)?);
    }
    Ok((s, names))
}

/// Runs one benchmark task from scratch. Tasks 3 and 6 first run the task
/// they continue from, then start from its mental model.
pub fn run_task(task: u8, mode: SearchMode) -> Result<TaskReport, BenchError> {
    run_task_session(task, mode).map(|(report, _)| report)
}

/// Like [`run_task`], also returning the session the task ran in.
pub fn run_task_session(task: u8, mode: SearchMode) -> Result<(TaskReport, Session), BenchError> {
    let title = TASKS
        .iter()
        .find(|(t, _)| *t == task)
        .ok_or(BenchError::UnknownTask(task))?
        .1;
    let perceive = ProblemSource::default;
    let mut phases = Vec::new();
    let (session, actions) = match task {
        1 | 2 | 3 => {
            let (mut s, names) = fresh(task, &[GraspStyle::ClawTop], false)?;
            let n = if task == 1 { 3 } else { 4 };
            place_cubes(&mut s, task, n)?;
            let ids: Vec<String> = (1..=n).map(|i| format!("cube{i}")).collect();
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            let first = if task == 1 { "task1" } else { "task2" };
            phases.push(phase(
                &mut s,
                task,
                first,
                tower(&ids, None),
                perceive(),
                mode,
                task == 3,
            )?);
            if task == 3 {
                phases.push(phase(
                    &mut s,
                    task,
                    "task3",
                    tower(&ids, Some("D")),
                    ProblemSource::MentalModel,
                    mode,
                    false,
                )?);
            }
            (s, names)
        }
        4 => {
            let (mut s, names) = fresh(task, &[GraspStyle::ClawTop, GraspStyle::ClawSide], false)?;
            place_cubes(&mut s, task, 3)?;
            let ids = ["cube1", "cube2", "cube3"];
            phases.push(phase(
                &mut s,
                task,
                "task4_build",
                tower(&ids, Some("A")),
                perceive(),
                mode,
                false,
            )?);
            phases.push(phase(
                &mut s,
                task,
                "task4_move",
                tower(&ids, Some("D")),
                ProblemSource::MentalModel,
                mode,
                false,
            )?);
            (s, names)
        }
        5 | 6 => {
            let (mut s, names) = fresh(task, &[GraspStyle::ClawTop, GraspStyle::SuctionTop], true)?;
            set_scene(
                &mut s,
                task,
                &[
                    ("base1", TypeTag::base(), "A"),
                    ("cube1", TypeTag::cube(), "B"),
                    ("roof1", TypeTag::roof(), "C"),
                ],
            )?;
            let ids = ["base1", "cube1", "roof1"];
            phases.push(phase(
                &mut s,
                task,
                "task5",
                tower(&ids, None),
                perceive(),
                mode,
                task == 6,
            )?);
            if task == 6 {
                phases.push(phase(
                    &mut s,
                    task,
                    "task6",
                    tower(&ids, Some("D")),
                    ProblemSource::MentalModel,
                    mode,
                    false,
                )?);
            }
            (s, names)
        }
        _ => unreachable!("task ids are checked above"),
    };
    let own: Vec<&PhaseReport> = phases.iter().filter(|p| !p.prerequisite).collect();
    let success = phases
        .iter()
        .all(|p| p.goal_satisfied && p.perceived_goal && p.model_matches_scene);
    let report = TaskReport {
        task,
        title: title.to_string(),
        mode,
        actions,
        plan_length: own.iter().map(|p| p.plan.len()).sum(),
        phases,
        success,
    };
    Ok((report, session))
}

/// Runs all six tasks in order.
pub fn run_all(mode: SearchMode) -> Result<Vec<TaskReport>, BenchError> {
    TASKS.iter().map(|(t, _)| run_task(*t, mode)).collect()
}

impl TaskReport {
    /// A short human-readable account.
    pub fn render(&self) -> String {
        let mut out = format!(
            "task {}: {} [{}]\n  actions: {}\n",
            self.task,
            self.title,
            if self.success { "OK" } else { "FAILED" },
            self.actions.join(", ")
        );
        for p in &self.phases {
            let tag = if p.prerequisite {
                " (prerequisite)"
            } else {
                ""
            };
            out.push_str(&format!(
                "  {}{tag}: goal {}\n",
                p.problem,
                p.goal.join(", ")
            ));
            for (i, s) in p.plan.iter().enumerate() {
                out.push_str(&format!("    {}. {s}\n", i + 1));
            }
            out.push_str(&format!(
                "    goal reached: {}, perceived: {}, model matches scene: {}\n",
                p.goal_satisfied, p.perceived_goal, p.model_matches_scene
            ));
        }
        out
    }
}
