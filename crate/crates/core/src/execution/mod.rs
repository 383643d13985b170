//! Plan execution on the simulated scene through the taught low-level
//! actions, with a mental model of landmark poses and believed atoms.

mod log;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::mpsc::Receiver;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demo::{replay, resolve_keyframes, SimSettings};
use crate::domain::Domain;
use crate::logic::Literal;
use crate::planner::{Plan, PlanStep};
use crate::world::{apply_corrections, perceive, Correction, PerceptionMode, PerceptionParams, Scene, Vec3, WorldError, WorldState};

pub use log::{ExecutionLog, LogEntry, Outcome};

/// How long a confirmation may take before the step counts as rejected.
pub const DEFAULT_CONFIRM_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecutionError {
    #[error("step {step}: `{action}` needs {literal}")]
    PreconditionUnsatisfied { step: usize, action: String, literal: Literal },
    #[error("no action named `{0}`")]
    UnknownAction(String),
    #[error("`{action}` takes {expected} arguments, got {got}")]
    ArityMismatch { action: String, expected: usize, got: usize },
    #[error("action `{0}` has no low-level action")]
    MissingLowLevel(String),
    #[error(transparent)]
    World(#[from] WorldError),
}

/// The user's judgement of an executed step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Reject,
}

/// Confirms every step.
pub fn auto_ok(_: &PlanStep, _: &Scene) -> Verdict {
    Verdict::Ok
}

/// Waits for a verdict on `rx`; a step not judged within `timeout`, or a
/// closed channel, counts as rejected.
pub fn channel_confirm(rx: Receiver<Verdict>, timeout: Duration) -> impl FnMut(&PlanStep, &Scene) -> Verdict {
    move |_, _| rx.recv_timeout(timeout).unwrap_or(Verdict::Reject)
}

/// What the executor believes about the world between steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MentalModel {
    /// Last believed pose of each known instance: the base center of an
    /// object, the table point of a position.
    pub poses: BTreeMap<String, Vec3>,
    pub atoms: WorldState,
    /// Instances moved since the model was last perceived.
    pub dirty: BTreeSet<String>,
    pub mode: PerceptionMode,
}

fn poses_of(scene: &Scene, state: &WorldState) -> BTreeMap<String, Vec3> {
    state
        .instances
        .keys()
        .filter_map(|id| {
            let p = scene.object(id).map(|o| o.pose).or_else(|| scene.position(id).map(|p| p.point()))?;
            Some((id.clone(), p))
        })
        .collect()
}

/// Perceives `scene` once and applies the user's corrections.
pub fn init_mental_model(
    scene: &Scene,
    params: &PerceptionParams,
    mode: PerceptionMode,
    corrections: &[Correction],
) -> Result<MentalModel, WorldError> {
    let perceived = perceive(scene, params, mode);
    let atoms = if corrections.is_empty() { perceived } else { apply_corrections(&perceived, scene, params, corrections)? };
    Ok(MentalModel { poses: poses_of(scene, &atoms), atoms, dirty: BTreeSet::new(), mode })
}

impl MentalModel {
    /// The scene with every known instance at its believed pose.
    pub fn believed_scene(&self, scene: &Scene) -> Scene {
        let mut s = scene.clone();
        for o in &mut s.objects {
            if let Some(p) = self.poses.get(&o.id) {
                o.pose = *p;
            }
        }
        s
    }

    pub fn satisfies(&self, goal: &BTreeSet<Literal>) -> bool {
        self.atoms.satisfies(goal)
    }
}

pub struct StepResult {
    pub scene: Scene,
    pub model: MentalModel,
    pub entry: LogEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub scene: Scene,
    pub model: MentalModel,
    pub log: ExecutionLog,
    /// Whether the final believed state satisfies the goal.
    pub goal_satisfied: bool,
}

/// Runs plan steps against a domain's low-level actions.
pub struct Executor<'a> {
    pub domain: &'a Domain,
    pub perception: &'a PerceptionParams,
    pub sim: SimSettings,
}

impl Executor<'_> {
    fn check_step(&self, state: &WorldState, index: usize, step: &PlanStep) -> Result<WorldState, ExecutionError> {
        let action = self.domain.actions.get(&step.name).ok_or_else(|| ExecutionError::UnknownAction(step.name.clone()))?;
        if action.params.len() != step.args.len() {
            return Err(ExecutionError::ArityMismatch {
                action: step.name.clone(),
                expected: action.params.len(),
                got: step.args.len(),
            });
        }
        let g = action.ground(&step.args);
        if let Some(literal) = g.pre.iter().find(|l| !l.holds_in(&state.atoms)) {
            return Err(ExecutionError::PreconditionUnsatisfied {
                step: index + 1,
                action: step.to_string(),
                literal: literal.clone(),
            });
        }
        Ok(state.apply_effects(&g.eff_plus, &g.eff_minus)?)
    }

    /// Executes one step. Preconditions are checked against the model
    /// before anything moves. A motion error leaves scene and model as they
    /// were and yields a FAILED entry. After the motion `confirm` judges the
    /// result: on OK the model takes the step's effects and the new poses of
    /// moved instances; on reject the model is perceived afresh.
    pub fn execute_plan_step(
        &self,
        model: &MentalModel,
        scene: &Scene,
        index: usize,
        step: &PlanStep,
        confirm: &mut dyn FnMut(&PlanStep, &Scene) -> Verdict,
    ) -> Result<StepResult, ExecutionError> {
        let believed_after = self.check_step(&model.atoms, index, step)?;
        let action = &self.domain.actions[&step.name];
        let low = self.domain.low_level_of(action).ok_or_else(|| ExecutionError::MissingLowLevel(step.name.clone()))?;
        let bindings = action.landmark_bindings(&step.args);
        let mut entry = LogEntry {
            step: step.clone(),
            bindings: bindings.clone(),
            pre_state: model.atoms.atoms.clone(),
            post_state: model.atoms.atoms.clone(),
            outcome: Outcome::Failed,
            error: None,
        };
        let moved = low
            .validate()
            .and_then(|_| resolve_keyframes(low, &model.believed_scene(scene), &bindings))
            .and_then(|k| replay(scene, &k, &self.sim));
        let after = match moved {
            Ok(s) => s,
            Err(e) => {
                entry.error = Some(e.to_string());
                return Ok(StepResult { scene: scene.clone(), model: model.clone(), entry });
            }
        };
        let changed: BTreeSet<String> = after
            .objects
            .iter()
            .filter(|o| scene.object(&o.id).is_none_or(|b| b.pose.distance(&o.pose) > 1e-9))
            .map(|o| o.id.clone())
            .collect();
        let next = match confirm(step, &after) {
            Verdict::Ok => {
                entry.outcome = Outcome::Ok;
                let mut m = model.clone();
                m.atoms = believed_after;
                for id in &changed {
                    if let Some(o) = after.object(id) {
                        m.poses.insert(id.clone(), o.pose);
                    }
                }
                m.dirty.extend(changed);
                m
            }
            Verdict::Reject => {
                entry.outcome = Outcome::Rejected;
                let atoms = perceive(&after, self.perception, model.mode);
                MentalModel { poses: poses_of(&after, &atoms), atoms, dirty: BTreeSet::new(), mode: model.mode }
            }
        };
        entry.post_state = next.atoms.atoms.clone();
        Ok(StepResult { scene: after, model: next, entry })
    }

    /// Checks the whole plan against the model, then runs its steps in
    /// order, stopping after the first step that is not OK.
    pub fn execute_plan(
        &self,
        model: &MentalModel,
        scene: &Scene,
        plan: &Plan,
        goal: &BTreeSet<Literal>,
        confirm: &mut dyn FnMut(&PlanStep, &Scene) -> Verdict,
    ) -> Result<ExecutionReport, ExecutionError> {
        let mut state = model.atoms.clone();
        for (i, s) in plan.steps.iter().enumerate() {
            state = self.check_step(&state, i, s)?;
        }
        let mut log = ExecutionLog::default();
        let mut model = model.clone();
        let mut scene = scene.clone();
        for (i, s) in plan.steps.iter().enumerate() {
            let r = self.execute_plan_step(&model, &scene, i, s, confirm)?;
            let stop = r.entry.outcome != Outcome::Ok;
            log.push(r.entry);
            model = r.model;
            scene = r.scene;
            if stop {
                break;
            }
        }
        let goal_satisfied = model.satisfies(goal);
        Ok(ExecutionReport { scene, model, log, goal_satisfied })
    }

    /// Re-simulates the motions of a log from `scene`.
    pub fn replay_log(&self, scene: &Scene, log: &ExecutionLog) -> Result<Scene, ExecutionError> {
        let mut scene = scene.clone();
        for e in log.entries().iter().filter(|e| e.outcome != Outcome::Failed) {
            let action = self.domain.actions.get(&e.step.name).ok_or_else(|| ExecutionError::UnknownAction(e.step.name.clone()))?;
            let low = self.domain.low_level_of(action).ok_or_else(|| ExecutionError::MissingLowLevel(e.step.name.clone()))?;
            let moved = resolve_keyframes(low, &scene, &e.bindings).and_then(|k| replay(&scene, &k, &self.sim));
            scene = moved.map_err(|err| ExecutionError::World(WorldError::InvalidScene(err.to_string())))?;
        }
        Ok(scene)
    }
}
