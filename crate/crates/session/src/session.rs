//! Session state and the operations of the interactive cycle.

use std::collections::{BTreeMap, BTreeSet};

use irp_core::demo::{
    begin_demo, DemoError, DemoScript, DemoSession, GripperCommand, Keyframe, LowLevelAction, Pose,
    SimSettings,
};
use irp_core::domain::Domain;
use irp_core::execution::{
    init_mental_model, ExecutionError, ExecutionLog, Executor, LogEntry, MentalModel, Outcome,
    Verdict,
};
use irp_core::inference::edit::is_valid_name;
use irp_core::inference::{action_from_demo, ActionEdit, HighLevelAction, InferenceError};
use irp_core::logic::{check_atom, Atom, Literal, SchemaError};
use irp_core::pddl::sexpr::{parse_one, SExpr};
use irp_core::pddl::{
    emit_domain, emit_problem, parse_domain, parse_problem, PddlError, PddlProblem,
};
use irp_core::planner::{
    ground_task, plan, validate_plan, Plan, PlanFailure, PlanStep, PlannerError, PlanningTask,
    SearchConfig, SearchMode,
};
use irp_core::world::{
    perceive, Arm, Correction, IrpConfig, PerceptionMode, PerceptionParams, Scene, WorldError,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("define at least one action before creating a problem")]
    NoActionsDefined,
    #[error("problem `{0}` has an empty goal")]
    EmptyGoal(String),
    #[error("no problem named `{0}`")]
    UnknownProblem(String),
    #[error("no plan {0}")]
    UnknownPlan(u64),
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("a demonstration is already in progress")]
    DemoInProgress,
    #[error("no demonstration in progress")]
    NoActiveDemo,
    #[error("plan {0} is being executed")]
    ExecutionInProgress(u64),
    #[error("stale snapshot: {0}")]
    StaleSnapshot(String),
    #[error("no mental model yet: execute a plan first")]
    NoMentalModel,
    #[error("no plan reaches the goal of `{0}`; see its debug summary")]
    NoSolution(String),
    #[error("plan {id} cannot run: {reason}")]
    PlanNotRunnable { id: u64, reason: String },
    #[error("planner: {0}")]
    Planner(PlannerError),
    #[error("plan failed validation: {0}")]
    InvalidPlan(PlanFailure),
    #[error("emitted PDDL does not reproduce the planning task")]
    PddlRoundTrip,
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Demo(#[from] DemoError),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Execution(#[from] ExecutionError),
    #[error("session file has schema version {found}, expected {expected}")]
    SchemaVersionMismatch { found: u64, expected: u32 },
    #[error("corrupt session file at byte {offset}: {message}")]
    CorruptFile { offset: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

impl SessionError {
    fn planner(problem: &str, e: PlannerError) -> Self {
        match e {
            PlannerError::NoSolution => SessionError::NoSolution(problem.to_string()),
            PlannerError::Pddl(p) => SessionError::Pddl(p),
            other => SessionError::Planner(other),
        }
    }
}

/// A planning problem: an initial belief and a goal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub name: String,
    /// The scene the initial state was taken from.
    pub scene: Scene,
    /// Initial belief; `model.atoms` is the initial state.
    pub model: MentalModel,
    pub goal: BTreeSet<Literal>,
    pub corrections: Vec<Correction>,
    /// Why the last solve failed, if it did.
    pub last_failure: Option<String>,
}

/// Where a new problem's initial state comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "from", rename_all = "snake_case")]
pub enum ProblemSource {
    /// Detect the current scene, then apply corrections.
    Perception {
        #[serde(default)]
        mode: PerceptionMode,
        #[serde(default)]
        corrections: Vec<Correction>,
    },
    /// Continue from the mental model the last execution left.
    MentalModel,
}

impl Default for ProblemSource {
    fn default() -> Self {
        ProblemSource::Perception {
            mode: PerceptionMode::Full,
            corrections: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum PlanStatus {
    /// Freshly solved; blocks domain and problem edits until accepted or
    /// discarded.
    Pending,
    Accepted,
    Discarded,
    Executing {
        next_step: usize,
    },
    Finished {
        goal_satisfied: bool,
    },
    Aborted {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredPlan {
    pub id: u64,
    pub problem: String,
    pub mode: SearchMode,
    pub plan: Plan,
    /// The PDDL the plan was computed from.
    pub domain_pddl: String,
    pub problem_pddl: String,
    pub status: PlanStatus,
    pub log: ExecutionLog,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveDemo {
    pub name: String,
    pub demo: DemoSession,
}

/// The plan being executed and the belief it runs on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub plan: u64,
    pub next_step: usize,
    pub model: MentalModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub message: String,
}

/// What one execution step did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub plan: u64,
    pub entry: LogEntry,
    pub finished: bool,
    /// Set once the execution has finished.
    pub goal_satisfied: Option<bool>,
}

/// A solve detached from the session so it can run without holding it.
#[derive(Debug, Clone)]
pub struct SolveJob {
    pub problem: String,
    pub mode: SearchMode,
    pub domain_pddl: String,
    pub problem_pddl: String,
    pub task: PlanningTask,
}

impl SolveJob {
    pub fn run(&self, config: &SearchConfig) -> Result<Plan, PlannerError> {
        plan(&self.task, config)
    }

    pub fn config(&self) -> SearchConfig {
        SearchConfig {
            mode: self.mode,
            ..SearchConfig::default()
        }
    }
}

/// Everything the user has built: the domain, the current scene, problems,
/// plans and their execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub config: IrpConfig,
    pub domain: Domain,
    pub scene: Scene,
    pub problems: BTreeMap<String, Problem>,
    pub plans: BTreeMap<u64, StoredPlan>,
    pub next_plan_id: u64,
    pub demo: Option<ActiveDemo>,
    pub execution: Option<Execution>,
    /// The belief the last finished execution left behind.
    pub model: Option<MentalModel>,
    /// A solved plan awaiting acceptance.
    pub pending: Option<u64>,
    pub events: Vec<Event>,
    #[serde(skip)]
    solving: Option<String>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(IrpConfig::default())
    }
}

impl Session {
    pub fn new(config: IrpConfig) -> Self {
        Session {
            config,
            domain: Domain::new("irp"),
            scene: Scene::tabletop(),
            problems: BTreeMap::new(),
            plans: BTreeMap::new(),
            next_plan_id: 1,
            demo: None,
            execution: None,
            model: None,
            pending: None,
            events: Vec::new(),
            solving: None,
        }
    }

    pub fn perception(&self) -> PerceptionParams {
        PerceptionParams::from_config(&self.config, self.domain.types.clone())
    }

    pub fn sim_settings(&self) -> SimSettings {
        SimSettings::from_config(&self.config)
    }

    fn record(&mut self, message: impl Into<String>) {
        let seq = self.events.last().map_or(1, |e| e.seq + 1);
        self.events.push(Event {
            seq,
            message: message.into(),
        });
    }

    /// Rejects mutations while a solve is in flight, a plan awaits
    /// acceptance or a plan is executing.
    fn writable(&self) -> Result<(), SessionError> {
        if let Some(p) = &self.solving {
            return Err(SessionError::StaleSnapshot(format!(
                "a solve of `{p}` is running"
            )));
        }
        if let Some(id) = self.pending {
            return Err(SessionError::StaleSnapshot(format!(
                "plan {id} awaits acceptance or discard"
            )));
        }
        if let Some(e) = &self.execution {
            return Err(SessionError::ExecutionInProgress(e.plan));
        }
        Ok(())
    }

    fn no_demo(&self) -> Result<(), SessionError> {
        match self.demo {
            Some(_) => Err(SessionError::DemoInProgress),
            None => Ok(()),
        }
    }

    pub fn set_scene(&mut self, scene: Scene) -> Result<(), SessionError> {
        self.writable()?;
        self.no_demo()?;
        scene.validate(&self.domain.types, self.config.thresholds.epsilon)?;
        self.record(format!("scene loaded with {} objects", scene.objects.len()));
        self.scene = scene;
        Ok(())
    }

    pub fn randomize_scene(&mut self, seed: u64, objects: usize) -> Result<(), SessionError> {
        let scene = Scene::random(
            seed,
            objects,
            &self.config.prototypes,
            &self.config.stackable,
            &self.domain.types,
        );
        self.set_scene(scene)
    }

    // ----- demonstrations and actions -----

    pub fn begin_demo(&mut self, name: &str) -> Result<&DemoSession, SessionError> {
        self.writable()?;
        self.no_demo()?;
        if !is_valid_name(name) {
            return Err(SessionError::InvalidName(name.to_string()));
        }
        if self.domain.actions.contains_key(name) {
            return Err(InferenceError::DuplicateName(name.to_string()).into());
        }
        let demo = begin_demo(&self.scene, &self.perception(), self.sim_settings());
        self.record(format!("demonstration of `{name}` started"));
        Ok(&self
            .demo
            .insert(ActiveDemo {
                name: name.to_string(),
                demo,
            })
            .demo)
    }

    pub fn record_keyframe(
        &mut self,
        arm: Arm,
        pose: Pose,
        gripper: GripperCommand,
    ) -> Result<Keyframe, SessionError> {
        let active = self.demo.as_mut().ok_or(SessionError::NoActiveDemo)?;
        Ok(active.demo.record_keyframe(arm, pose, gripper)?.clone())
    }

    pub fn reassign_frame(
        &mut self,
        index: usize,
        landmark: Option<&str>,
    ) -> Result<(), SessionError> {
        let active = self.demo.as_mut().ok_or(SessionError::NoActiveDemo)?;
        Ok(active.demo.reassign_frame(index, landmark)?)
    }

    pub fn cancel_demo(&mut self) -> Result<(), SessionError> {
        self.demo.take().ok_or(SessionError::NoActiveDemo)?;
        self.record("demonstration cancelled");
        Ok(())
    }

    /// Ends the demonstration, infers and lifts its action and adds it to
    /// the domain. The scene becomes the one the demonstration left.
    pub fn finish_demo(&mut self) -> Result<&HighLevelAction, SessionError> {
        self.writable()?;
        let active = self.demo.clone().ok_or(SessionError::NoActiveDemo)?;
        let result = active.demo.finish(&active.name, &self.perception())?;
        let action = action_from_demo(&active.name, &result, &self.domain.types)?;
        self.domain.add_action(action, Some(result.action))?;
        self.demo = None;
        self.scene = result.scene_after;
        self.record(format!("action `{}` taught", active.name));
        Ok(&self.domain.actions[&active.name])
    }

    /// Teaches an action from a scripted demonstration on the script's
    /// scene.
    pub fn teach(&mut self, script: &DemoScript) -> Result<&HighLevelAction, SessionError> {
        if script.steps.windows(2).any(|w| w[1].t < w[0].t) {
            return Err(DemoError::InvalidScript("step times must not decrease".into()).into());
        }
        self.set_scene(script.scene.clone())?;
        self.begin_demo(&script.name)?;
        for s in &script.steps {
            if let Err(e) = self.record_keyframe(s.arm, s.pose, s.gripper) {
                self.demo = None;
                return Err(e);
            }
        }
        self.finish_demo()
    }

    pub fn add_action(
        &mut self,
        action: HighLevelAction,
        low_level: Option<LowLevelAction>,
    ) -> Result<(), SessionError> {
        self.writable()?;
        let name = action.name.clone();
        self.domain.add_action(action, low_level)?;
        self.record(format!("action `{name}` added"));
        Ok(())
    }

    pub fn copy_action(&mut self, from: &str, to: &str) -> Result<&HighLevelAction, SessionError> {
        self.writable()?;
        self.domain.copy_action(from, to)?;
        self.record(format!("action `{from}` copied to `{to}`"));
        Ok(&self.domain.actions[to])
    }

    pub fn edit_action(
        &mut self,
        name: &str,
        edit: &ActionEdit,
    ) -> Result<&HighLevelAction, SessionError> {
        self.writable()?;
        let new_name = self.domain.edit_action(name, edit)?.name.clone();
        self.record(format!(
            "action `{name}` edited: {}",
            serde_json::to_string(edit).unwrap_or_default()
        ));
        Ok(&self.domain.actions[&new_name])
    }

    pub fn remove_action(&mut self, name: &str) -> Result<HighLevelAction, SessionError> {
        self.writable()?;
        let a = self.domain.remove_action(name)?;
        self.record(format!("action `{name}` removed"));
        Ok(a)
    }

    // ----- problems and planning -----

    /// Creates or replaces a problem. The initial state is perceived from
    /// the current scene with corrections, or taken from the mental model.
    pub fn create_problem(
        &mut self,
        name: &str,
        goal: BTreeSet<Literal>,
        source: ProblemSource,
    ) -> Result<&Problem, SessionError> {
        self.writable()?;
        if self.domain.actions.is_empty() {
            return Err(SessionError::NoActionsDefined);
        }
        if !is_valid_name(name) {
            return Err(SessionError::InvalidName(name.to_string()));
        }
        let (model, corrections) = match source {
            ProblemSource::Perception { mode, corrections } => (
                init_mental_model(&self.scene, &self.perception(), mode, &corrections)?,
                corrections,
            ),
            ProblemSource::MentalModel => (
                self.model.clone().ok_or(SessionError::NoMentalModel)?,
                Vec::new(),
            ),
        };
        self.check_goal(&model, &goal)?;
        let problem = Problem {
            name: name.to_string(),
            scene: self.scene.clone(),
            model,
            goal,
            corrections,
            last_failure: None,
        };
        self.record(format!("problem `{name}` created"));
        self.problems.insert(name.to_string(), problem);
        Ok(&self.problems[name])
    }

    pub fn set_goal(
        &mut self,
        name: &str,
        goal: BTreeSet<Literal>,
    ) -> Result<&Problem, SessionError> {
        self.writable()?;
        let model = self.problem(name)?.model.clone();
        self.check_goal(&model, &goal)?;
        let p = self.problems.get_mut(name).expect("checked above");
        p.goal = goal;
        p.last_failure = None;
        self.record(format!("goal of `{name}` changed"));
        Ok(&self.problems[name])
    }

    fn check_goal(
        &self,
        model: &MentalModel,
        goal: &BTreeSet<Literal>,
    ) -> Result<(), SessionError> {
        for l in goal {
            check_atom(&l.atom, &self.domain.predicates, &self.domain.types, |a| {
                model.atoms.instances.get(a)
            })
            .map_err(|e| match e {
                SchemaError::UnknownInstance(id) => {
                    SessionError::World(WorldError::UnknownInstance(id))
                }
                other => SessionError::InvalidRequest(format!("goal {l}: {other}")),
            })?;
        }
        Ok(())
    }

    pub fn problem(&self, name: &str) -> Result<&Problem, SessionError> {
        self.problems
            .get(name)
            .ok_or_else(|| SessionError::UnknownProblem(name.to_string()))
    }

    pub fn plan(&self, id: u64) -> Result<&StoredPlan, SessionError> {
        self.plans.get(&id).ok_or(SessionError::UnknownPlan(id))
    }

    /// The PDDL text of a problem against the current domain.
    pub fn problem_pddl(&self, name: &str) -> Result<PddlProblem, SessionError> {
        let p = self.problem(name)?;
        Ok(PddlProblem::from_state(
            name,
            &self.domain.name,
            &p.model.atoms,
            p.goal.clone(),
        ))
    }

    /// Snapshots the domain and problem as PDDL, grounds them and checks
    /// the emitted text re-parses to the same task. Marks a solve in flight
    /// until [`Session::finish_solve`].
    pub fn begin_solve(&mut self, name: &str, mode: SearchMode) -> Result<SolveJob, SessionError> {
        if let Some(p) = &self.solving {
            return Err(SessionError::StaleSnapshot(format!(
                "a solve of `{p}` is running"
            )));
        }
        if let Some(e) = &self.execution {
            return Err(SessionError::ExecutionInProgress(e.plan));
        }
        self.no_demo()?;
        let problem = self.problem(name)?;
        if problem.goal.is_empty() {
            return Err(SessionError::EmptyGoal(name.to_string()));
        }
        let domain = self.domain.to_pddl();
        let pddl_problem = self.problem_pddl(name)?;
        let task =
            ground_task(&domain, &pddl_problem).map_err(|e| SessionError::planner(name, e))?;
        let domain_pddl = emit_domain(&domain);
        let problem_pddl = emit_problem(&pddl_problem);
        let reparsed = parse_problem(&problem_pddl)?;
        let again = ground_task(&parse_domain(&domain_pddl)?, &reparsed)
            .map_err(|e| SessionError::planner(name, e))?;
        if again.action_signatures() != task.action_signatures()
            || again.init_atoms() != task.init_atoms()
            || reparsed.goal != pddl_problem.goal
        {
            return Err(SessionError::PddlRoundTrip);
        }
        self.solving = Some(name.to_string());
        Ok(SolveJob {
            problem: name.to_string(),
            mode,
            domain_pddl,
            problem_pddl,
            task,
        })
    }

    /// Stores the outcome of a solve. A found plan is validated and becomes
    /// the pending plan, replacing any earlier pending one.
    pub fn finish_solve(
        &mut self,
        job: SolveJob,
        result: Result<Plan, PlannerError>,
    ) -> Result<u64, SessionError> {
        self.solving = None;
        let name = job.problem.clone();
        let plan = match result {
            Ok(p) => p,
            Err(e) => {
                let err = SessionError::planner(&name, e);
                if let Some(p) = self.problems.get_mut(&name) {
                    p.last_failure = Some(err.to_string());
                }
                self.record(format!("solving `{name}` failed: {err}"));
                return Err(err);
            }
        };
        validate_plan(&job.task, &plan).map_err(SessionError::InvalidPlan)?;
        if let Some(old) = self.pending.take() {
            if let Some(p) = self.plans.get_mut(&old) {
                p.status = PlanStatus::Discarded;
            }
        }
        let id = self.next_plan_id;
        self.next_plan_id += 1;
        if let Some(p) = self.problems.get_mut(&name) {
            p.last_failure = None;
        }
        self.record(format!("plan {id} for `{name}` has {} steps", plan.len()));
        self.plans.insert(
            id,
            StoredPlan {
                id,
                problem: name,
                mode: job.mode,
                plan,
                domain_pddl: job.domain_pddl,
                problem_pddl: job.problem_pddl,
                status: PlanStatus::Pending,
                log: ExecutionLog::default(),
            },
        );
        self.pending = Some(id);
        Ok(id)
    }

    /// Plans for a problem and stores the result as the pending plan.
    pub fn solve(&mut self, name: &str, mode: SearchMode) -> Result<u64, SessionError> {
        let job = self.begin_solve(name, mode)?;
        let result = job.run(&job.config());
        self.finish_solve(job, result)
    }

    /// Re-perceives the current scene into the problem, keeping its goal,
    /// corrections and perception mode, and solves again.
    pub fn replan(&mut self, name: &str, mode: SearchMode) -> Result<u64, SessionError> {
        if let Some(id) = self.pending {
            self.discard_plan(id)?;
        }
        let p = self.problem(name)?.clone();
        let source = ProblemSource::Perception {
            mode: p.model.mode,
            corrections: p.corrections,
        };
        self.create_problem(name, p.goal, source)?;
        self.solve(name, mode)
    }

    pub fn accept_plan(&mut self, id: u64) -> Result<(), SessionError> {
        let plan = self
            .plans
            .get_mut(&id)
            .ok_or(SessionError::UnknownPlan(id))?;
        if plan.status != PlanStatus::Pending {
            return Err(SessionError::PlanNotRunnable {
                id,
                reason: "it is not pending".into(),
            });
        }
        plan.status = PlanStatus::Accepted;
        self.pending = None;
        self.record(format!("plan {id} accepted"));
        Ok(())
    }

    pub fn discard_plan(&mut self, id: u64) -> Result<(), SessionError> {
        let plan = self
            .plans
            .get_mut(&id)
            .ok_or(SessionError::UnknownPlan(id))?;
        if !matches!(plan.status, PlanStatus::Pending | PlanStatus::Accepted) {
            return Err(SessionError::PlanNotRunnable {
                id,
                reason: "it is neither pending nor accepted".into(),
            });
        }
        plan.status = PlanStatus::Discarded;
        if self.pending == Some(id) {
            self.pending = None;
        }
        self.record(format!("plan {id} discarded"));
        Ok(())
    }

    // ----- execution -----

    /// Executes the next step of plan `id`, starting its execution if
    /// needed. A pending plan is accepted by starting it. `confirm` judges
    /// the step after the motion.
    pub fn execute_step(
        &mut self,
        id: u64,
        confirm: &mut dyn FnMut(&PlanStep, &Scene) -> Verdict,
    ) -> Result<StepReport, SessionError> {
        if self.execution.is_none() {
            self.start_execution(id)?;
        }
        let exec = self.execution.clone().expect("started above");
        if exec.plan != id {
            return Err(SessionError::ExecutionInProgress(exec.plan));
        }
        let stored = self.plan(id)?.clone();
        let problem = self.problem(&stored.problem)?.clone();
        let perception = self.perception();
        let executor = Executor {
            domain: &self.domain,
            perception: &perception,
            sim: self.sim_settings(),
        };
        let step = &stored.plan.steps[exec.next_step];
        let result = match executor.execute_plan_step(
            &exec.model,
            &self.scene,
            exec.next_step,
            step,
            confirm,
        ) {
            Ok(r) => r,
            Err(e) => {
                self.end_execution(
                    id,
                    PlanStatus::Aborted {
                        reason: e.to_string(),
                    },
                    None,
                );
                return Err(e.into());
            }
        };
        let next_step = exec.next_step + 1;
        let ok = result.entry.outcome == Outcome::Ok;
        self.scene = result.scene;
        let entry = result.entry.clone();
        self.plans
            .get_mut(&id)
            .expect("plan exists")
            .log
            .push(result.entry);
        self.record(format!(
            "plan {id} step {next_step}: {} {:?}",
            entry.step, entry.outcome
        ));
        if ok && next_step < stored.plan.len() {
            self.execution = Some(Execution {
                plan: id,
                next_step,
                model: result.model,
            });
            self.plans.get_mut(&id).expect("plan exists").status =
                PlanStatus::Executing { next_step };
            return Ok(StepReport {
                plan: id,
                entry,
                finished: false,
                goal_satisfied: None,
            });
        }
        let goal_satisfied = result.model.satisfies(&problem.goal);
        let status = if ok {
            PlanStatus::Finished { goal_satisfied }
        } else {
            PlanStatus::Aborted {
                reason: format!("step {next_step} {:?}", entry.outcome).to_lowercase(),
            }
        };
        self.end_execution(id, status, Some(result.model));
        Ok(StepReport {
            plan: id,
            entry,
            finished: true,
            goal_satisfied: Some(goal_satisfied),
        })
    }

    fn start_execution(&mut self, id: u64) -> Result<(), SessionError> {
        self.no_demo()?;
        let plan = self.plan(id)?;
        if !matches!(plan.status, PlanStatus::Pending | PlanStatus::Accepted) {
            return Err(SessionError::PlanNotRunnable {
                id,
                reason: format!("its status is {:?}", plan.status),
            });
        }
        if plan.plan.is_empty() {
            return Err(SessionError::PlanNotRunnable {
                id,
                reason: "it has no steps".into(),
            });
        }
        let model = self.problem(&plan.problem)?.model.clone();
        self.pending = self.pending.filter(|p| *p != id);
        self.plans.get_mut(&id).expect("plan exists").status =
            PlanStatus::Executing { next_step: 0 };
        self.execution = Some(Execution {
            plan: id,
            next_step: 0,
            model,
        });
        self.record(format!("plan {id} execution started"));
        Ok(())
    }

    fn end_execution(&mut self, id: u64, status: PlanStatus, model: Option<MentalModel>) {
        self.record(format!("plan {id} ended: {status:?}"));
        if let Some(p) = self.plans.get_mut(&id) {
            p.status = status;
        }
        if model.is_some() {
            self.model = model;
        }
        self.execution = None;
    }

    /// Runs every remaining step of plan `id`, stopping after the first one
    /// that is not OK. Returns the last step's report; `None` for a plan
    /// without steps.
    pub fn execute_plan(
        &mut self,
        id: u64,
        confirm: &mut dyn FnMut(&PlanStep, &Scene) -> Verdict,
    ) -> Result<Option<StepReport>, SessionError> {
        let plan = self.plan(id)?;
        if plan.plan.is_empty() && self.execution.is_none() {
            if !matches!(plan.status, PlanStatus::Pending | PlanStatus::Accepted) {
                return Err(SessionError::PlanNotRunnable {
                    id,
                    reason: format!("its status is {:?}", plan.status),
                });
            }
            let problem = self.problem(&plan.problem)?;
            let model = problem.model.clone();
            let done = PlanStatus::Finished {
                goal_satisfied: model.satisfies(&problem.goal),
            };
            self.pending = self.pending.filter(|p| *p != id);
            self.end_execution(id, done, Some(model));
            return Ok(None);
        }
        loop {
            let r = self.execute_step(id, confirm)?;
            if r.finished {
                return Ok(Some(r));
            }
        }
    }

    /// What the current scene looks like to full perception.
    pub fn perceived(&self) -> irp_core::world::WorldState {
        perceive(&self.scene, &self.perception(), PerceptionMode::Full)
    }

    /// Marks the end of an in-flight solve without storing anything.
    pub fn abandon_solve(&mut self) {
        self.solving = None;
    }
}

/// Parses a ground literal in either notation: `on(a, B)` / `not on(a, B)`
/// or `(on a B)` / `(not (on a B))`.
pub fn parse_literal(text: &str) -> Result<Literal, SessionError> {
    let bad = || SessionError::InvalidRequest(format!("cannot read literal `{text}`"));
    let t = text.trim();
    if t.starts_with('(') {
        let sx = parse_one(t).map_err(|_| bad())?;
        let atom = |e: &SExpr| -> Result<Atom, SessionError> {
            let items = e.list().ok_or_else(bad)?;
            let names: Option<Vec<&str>> = items.iter().map(|i| i.symbol()).collect();
            let names = names.ok_or_else(bad)?;
            let (p, args) = names.split_first().ok_or_else(bad)?;
            Ok(Atom::new(p, args.iter().copied()))
        };
        let items = sx.list().ok_or_else(bad)?;
        return match items {
            [head, inner] if head.symbol().is_some_and(|s| s.eq_ignore_ascii_case("not")) => {
                Ok(Literal::neg(atom(inner)?))
            }
            _ => Ok(Literal::pos(atom(&sx)?)),
        };
    }
    let (positive, rest) = match t.strip_prefix("not ") {
        Some(r) => (false, r.trim()),
        None => (true, t),
    };
    let (pred, args) = rest.split_once('(').ok_or_else(bad)?;
    let args = args.strip_suffix(')').ok_or_else(bad)?;
    let args: Vec<&str> = if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',').map(str::trim).collect()
    };
    let pred = pred.trim();
    if pred.is_empty()
        || args
            .iter()
            .any(|a| a.is_empty() || a.contains(char::is_whitespace))
    {
        return Err(bad());
    }
    let atom = Atom::new(pred, args);
    Ok(if positive {
        Literal::pos(atom)
    } else {
        Literal::neg(atom)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_in_both_notations() {
        let on = Literal::pos(Atom::on("obj1", "B"));
        assert_eq!(parse_literal("on(obj1, B)").unwrap(), on);
        assert_eq!(parse_literal("(on obj1 B)").unwrap(), on);
        assert_eq!(parse_literal("not on(obj1,B)").unwrap(), on.negated());
        assert_eq!(parse_literal("(not (on obj1 B))").unwrap(), on.negated());
        assert_eq!(parse_literal(&on.to_string()).unwrap(), on);
        assert_eq!(
            parse_literal(&on.negated().to_string()).unwrap(),
            on.negated()
        );
        for bad in ["on obj1 B", "(on (x) B)", "on(a b)", "", "()", "on(a,)"] {
            assert!(parse_literal(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn fresh_session_guards() {
        let mut s = Session::default();
        let r = s.create_problem("p", BTreeSet::new(), ProblemSource::default());
        assert!(matches!(r, Err(SessionError::NoActionsDefined)));
        assert!(matches!(s.finish_demo(), Err(SessionError::NoActiveDemo)));
        s.begin_demo("move").unwrap();
        assert!(matches!(
            s.begin_demo("other"),
            Err(SessionError::DemoInProgress)
        ));
        assert!(matches!(
            s.finish_demo(),
            Err(SessionError::Demo(DemoError::EmptyDemonstration))
        ));
        s.cancel_demo().unwrap();
        assert!(matches!(
            s.begin_demo("bad name"),
            Err(SessionError::InvalidName(_))
        ));
    }
}
