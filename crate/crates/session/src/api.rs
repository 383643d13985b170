//! JSON REST API over one shared session.

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use irp_core::demo::{DemoScript, GripperCommand, LowLevelAction, Pose};
use irp_core::execution::Verdict;
use irp_core::inference::{render_action, ActionEdit, HighLevelAction};
use irp_core::logic::Literal;
use irp_core::pddl::emit_domain;
use irp_core::planner::SearchMode;
use irp_core::world::{Arm, Scene, Vec3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::session::{parse_literal, ProblemSource, Session, SessionError, StoredPlan};

pub type SharedSession = Arc<Mutex<Session>>;

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

fn kind(e: &SessionError) -> (StatusCode, &'static str) {
    use SessionError::*;
    match e {
        NoActionsDefined => (StatusCode::BAD_REQUEST, "no_actions_defined"),
        EmptyGoal(_) => (StatusCode::BAD_REQUEST, "empty_goal"),
        UnknownProblem(_) => (StatusCode::NOT_FOUND, "unknown_problem"),
        UnknownPlan(_) => (StatusCode::NOT_FOUND, "unknown_plan"),
        InvalidName(_) => (StatusCode::BAD_REQUEST, "invalid_name"),
        DemoInProgress => (StatusCode::CONFLICT, "demo_in_progress"),
        NoActiveDemo => (StatusCode::CONFLICT, "no_active_demo"),
        ExecutionInProgress(_) => (StatusCode::CONFLICT, "execution_in_progress"),
        StaleSnapshot(_) => (StatusCode::CONFLICT, "stale_snapshot"),
        NoMentalModel => (StatusCode::CONFLICT, "no_mental_model"),
        NoSolution(_) => (StatusCode::UNPROCESSABLE_ENTITY, "no_solution"),
        PlanNotRunnable { .. } => (StatusCode::CONFLICT, "plan_not_runnable"),
        Planner(_) => (StatusCode::UNPROCESSABLE_ENTITY, "resource_limit"),
        InvalidPlan(_) => (StatusCode::INTERNAL_SERVER_ERROR, "invalid_plan"),
        PddlRoundTrip => (StatusCode::INTERNAL_SERVER_ERROR, "pddl_round_trip"),
        Inference(irp_core::inference::InferenceError::UnknownAction(_)) => {
            (StatusCode::NOT_FOUND, "unknown_action")
        }
        Inference(irp_core::inference::InferenceError::DuplicateName(_)) => {
            (StatusCode::CONFLICT, "duplicate_name")
        }
        Inference(_) => (StatusCode::BAD_REQUEST, "inference"),
        World(_) => (StatusCode::BAD_REQUEST, "world"),
        Demo(_) => (StatusCode::BAD_REQUEST, "demo"),
        Pddl(_) => (StatusCode::BAD_REQUEST, "pddl"),
        Execution(_) => (StatusCode::CONFLICT, "execution"),
        SchemaVersionMismatch { .. } => (StatusCode::BAD_REQUEST, "schema_version_mismatch"),
        CorruptFile { .. } => (StatusCode::BAD_REQUEST, "corrupt_file"),
        Io { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
        InvalidRequest(_) => (StatusCode::BAD_REQUEST, "invalid_request"),
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = kind(&self.0);
        let mut body = json!({ "error": kind, "message": self.0.to_string() });
        match &self.0 {
            SessionError::NoSolution(p) => body["debug"] = json!(format!("/api/debug/{p}")),
            SessionError::CorruptFile { offset, .. } => body["offset"] = json!(offset),
            _ => {}
        }
        (status, Json(body)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

fn lock(state: &SharedSession) -> MutexGuard<'_, Session> {
    state.lock().unwrap_or_else(|e| e.into_inner())
}

/// Reads a JSON body; an empty body reads as the default.
fn body<T: DeserializeOwned + Default>(bytes: &Bytes) -> Result<T, ApiError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError(SessionError::InvalidRequest(e.to_string())))
}

fn required<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError(SessionError::InvalidRequest(e.to_string())))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("api values serialize")
}

fn action_view(a: &HighLevelAction) -> Value {
    json!({ "action": a, "english": render_action(a) })
}

fn plan_view(p: &StoredPlan) -> Value {
    let mut v = to_value(p);
    v["rendered"] = json!(p.plan.render());
    v
}

pub fn router(state: SharedSession) -> Router {
    Router::new()
        .route("/api/session", get(get_session))
        .route("/api/actions", get(list_actions).post(add_action))
        .route("/api/actions/{name}/copy", post(copy_action))
        .route(
            "/api/actions/{name}",
            axum::routing::patch(edit_action).get(get_action),
        )
        .route("/api/demo/begin", post(demo_begin))
        .route("/api/demo/keyframe", post(demo_keyframe))
        .route("/api/demo/finish", post(demo_finish))
        .route("/api/demo/cancel", post(demo_cancel))
        .route("/api/scene", get(get_scene).post(set_scene))
        .route("/api/problems", get(list_problems).post(create_problem))
        .route("/api/problems/{name}/solve", post(solve))
        .route("/api/plans/{id}", get(get_plan))
        .route("/api/plans/{id}/execute/step", post(execute_step))
        .route("/api/plans/{id}/accept", post(accept_plan))
        .route("/api/plans/{id}/discard", post(discard_plan))
        .route("/api/debug/{problem}", get(debug))
        .route("/api/save", get(get_save).post(post_save))
        .route("/api/load", post(load))
        .with_state(state)
}

/// Serves the API on `addr` until the process ends.
pub async fn serve(addr: SocketAddr, session: Session) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(Mutex::new(session)))).await
}

async fn get_session(State(st): State<SharedSession>) -> ApiResult {
    let s = lock(&st);
    let plans: Vec<Value> = s
        .plans
        .values()
        .map(|p| json!({ "id": p.id, "problem": p.problem, "status": p.status }))
        .collect();
    let events = &s.events[s.events.len().saturating_sub(50)..];
    Ok(Json(json!({
        "domain": s.domain.name,
        "actions": s.domain.actions.keys().collect::<Vec<_>>(),
        "problems": s.problems.keys().collect::<Vec<_>>(),
        "plans": plans,
        "demo": s.demo.as_ref().map(|d| json!({ "name": d.name, "keyframes": d.demo.keyframes() })),
        "execution": s.execution,
        "pending": s.pending,
        "has_mental_model": s.model.is_some(),
        "events": events,
        "config": s.config,
    })))
}

async fn list_actions(State(st): State<SharedSession>) -> ApiResult {
    let s = lock(&st);
    let actions: Vec<Value> = s.domain.actions.values().map(action_view).collect();
    Ok(Json(
        json!({ "actions": actions, "pddl": emit_domain(&s.domain.to_pddl()) }),
    ))
}

async fn get_action(State(st): State<SharedSession>, Path(name): Path<String>) -> ApiResult {
    let s = lock(&st);
    let a = s.domain.action(&name).map_err(SessionError::from)?;
    Ok(Json(action_view(a)))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NewAction {
    Script {
        script: DemoScript,
    },
    Lifted {
        action: HighLevelAction,
        low_level: Option<LowLevelAction>,
    },
}

async fn add_action(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: NewAction = required(&bytes)?;
    let mut s = lock(&st);
    let a = match req {
        NewAction::Script { script } => s.teach(&script)?.clone(),
        NewAction::Lifted { action, low_level } => {
            let name = action.name.clone();
            s.add_action(action, low_level)?;
            s.domain.actions[&name].clone()
        }
    };
    Ok(Json(action_view(&a)))
}

#[derive(Deserialize)]
struct CopyRequest {
    to: String,
}

async fn copy_action(
    State(st): State<SharedSession>,
    Path(name): Path<String>,
    bytes: Bytes,
) -> ApiResult {
    let req: CopyRequest = required(&bytes)?;
    let mut s = lock(&st);
    let a = s.copy_action(&name, &req.to)?.clone();
    Ok(Json(action_view(&a)))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EditRequest {
    Many { edits: Vec<ActionEdit> },
    One(ActionEdit),
}

async fn edit_action(
    State(st): State<SharedSession>,
    Path(name): Path<String>,
    bytes: Bytes,
) -> ApiResult {
    let edits = match required::<EditRequest>(&bytes)? {
        EditRequest::Many { edits } => edits,
        EditRequest::One(e) => vec![e],
    };
    let mut s = lock(&st);
    let before = s.domain.clone();
    let mut current = name;
    for e in &edits {
        match s.edit_action(&current, e) {
            Ok(a) => current = a.name.clone(),
            Err(err) => {
                s.domain = before;
                return Err(err.into());
            }
        }
    }
    let a = s.domain.actions[&current].clone();
    Ok(Json(action_view(&a)))
}

#[derive(Deserialize)]
struct BeginRequest {
    name: String,
}

async fn demo_begin(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: BeginRequest = required(&bytes)?;
    let mut s = lock(&st);
    let demo = s.begin_demo(&req.name)?;
    Ok(Json(
        json!({ "name": req.name, "o1": demo.o1, "scene": demo.live() }),
    ))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PoseInput {
    Full(Pose),
    Position([f64; 3]),
}

#[derive(Deserialize)]
struct KeyframeRequest {
    arm: Arm,
    pose: PoseInput,
    gripper: GripperCommand,
}

async fn demo_keyframe(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: KeyframeRequest = required(&bytes)?;
    let pose = match req.pose {
        PoseInput::Full(p) => p,
        PoseInput::Position([x, y, z]) => Pose::at(Vec3::new(x, y, z)),
    };
    let mut s = lock(&st);
    let k = s.record_keyframe(req.arm, pose, req.gripper)?;
    let live = s.demo.as_ref().map(|d| d.demo.live().clone());
    Ok(Json(json!({ "keyframe": k, "scene": live })))
}

async fn demo_finish(State(st): State<SharedSession>) -> ApiResult {
    let mut s = lock(&st);
    let a = s.finish_demo()?.clone();
    Ok(Json(action_view(&a)))
}

async fn demo_cancel(State(st): State<SharedSession>) -> ApiResult {
    lock(&st).cancel_demo()?;
    Ok(Json(json!({ "cancelled": true })))
}

async fn get_scene(State(st): State<SharedSession>) -> ApiResult {
    let s = lock(&st);
    let scene = s.demo.as_ref().map_or(&s.scene, |d| d.demo.live());
    Ok(Json(json!({ "scene": scene, "perceived": s.perceived() })))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SceneRequest {
    Load {
        scene: Scene,
    },
    Random {
        seed: u64,
        #[serde(default = "default_objects")]
        objects: usize,
    },
}

fn default_objects() -> usize {
    3
}

async fn set_scene(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: SceneRequest = required(&bytes)?;
    let mut s = lock(&st);
    match req {
        SceneRequest::Load { scene } => s.set_scene(scene)?,
        SceneRequest::Random { seed, objects } => s.randomize_scene(seed, objects)?,
    }
    Ok(Json(
        json!({ "scene": s.scene, "perceived": s.perceived() }),
    ))
}

async fn list_problems(State(st): State<SharedSession>) -> ApiResult {
    let s = lock(&st);
    Ok(Json(
        json!({ "problems": s.problems.values().collect::<Vec<_>>() }),
    ))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GoalItem {
    Text(String),
    Literal(Literal),
}

#[derive(Deserialize)]
struct ProblemRequest {
    name: String,
    #[serde(default)]
    goal: Vec<GoalItem>,
    #[serde(default)]
    source: ProblemSource,
}

async fn create_problem(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: ProblemRequest = required(&bytes)?;
    let goal: BTreeSet<Literal> = req
        .goal
        .into_iter()
        .map(|g| match g {
            GoalItem::Text(t) => parse_literal(&t),
            GoalItem::Literal(l) => Ok(l),
        })
        .collect::<Result<_, _>>()?;
    let mut s = lock(&st);
    let p = s.create_problem(&req.name, goal, req.source)?;
    Ok(Json(to_value(p)))
}

#[derive(Deserialize, Default)]
struct SolveRequest {
    #[serde(default)]
    mode: SearchMode,
}

async fn solve(
    State(st): State<SharedSession>,
    Path(name): Path<String>,
    bytes: Bytes,
) -> ApiResult {
    let req: SolveRequest = body(&bytes)?;
    let job = lock(&st).begin_solve(&name, req.mode)?;
    let config = job.config();
    let joined = tokio::task::spawn_blocking(move || {
        let result = job.run(&config);
        (job, result)
    })
    .await;
    let mut s = lock(&st);
    let (job, result) = match joined {
        Ok(r) => r,
        Err(e) => {
            s.abandon_solve();
            return Err(SessionError::InvalidRequest(format!("planner task failed: {e}")).into());
        }
    };
    let id = s.finish_solve(job, result)?;
    Ok(Json(plan_view(s.plan(id)?)))
}

async fn get_plan(State(st): State<SharedSession>, Path(id): Path<u64>) -> ApiResult {
    let s = lock(&st);
    Ok(Json(plan_view(s.plan(id)?)))
}

#[derive(Deserialize)]
struct StepRequest {
    verdict: Verdict,
}

async fn execute_step(
    State(st): State<SharedSession>,
    Path(id): Path<u64>,
    bytes: Bytes,
) -> ApiResult {
    let req: StepRequest = required(&bytes)?;
    let mut s = lock(&st);
    let report = s.execute_step(id, &mut |_, _| req.verdict)?;
    Ok(Json(
        json!({ "report": report, "scene": s.scene, "status": s.plan(id)?.status }),
    ))
}

async fn accept_plan(State(st): State<SharedSession>, Path(id): Path<u64>) -> ApiResult {
    let mut s = lock(&st);
    s.accept_plan(id)?;
    Ok(Json(plan_view(s.plan(id)?)))
}

async fn discard_plan(State(st): State<SharedSession>, Path(id): Path<u64>) -> ApiResult {
    let mut s = lock(&st);
    s.discard_plan(id)?;
    Ok(Json(plan_view(s.plan(id)?)))
}

async fn debug(State(st): State<SharedSession>, Path(problem): Path<String>) -> ApiResult {
    let s = lock(&st);
    Ok(Json(to_value(&s.debug_summary(&problem)?)))
}

async fn get_save(State(st): State<SharedSession>) -> Result<Response, ApiError> {
    let text = lock(&st).to_json();
    Ok((
        [(axum::http::header::CONTENT_TYPE, "application/json")],
        text,
    )
        .into_response())
}

#[derive(Deserialize)]
struct PathRequest {
    path: PathBuf,
}

async fn post_save(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: PathRequest = required(&bytes)?;
    lock(&st).save(&req.path)?;
    Ok(Json(json!({ "saved": req.path })))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LoadRequest {
    Path { path: PathBuf },
    Text { text: String },
}

async fn load(State(st): State<SharedSession>, bytes: Bytes) -> ApiResult {
    let req: LoadRequest = required(&bytes)?;
    let loaded = match req {
        LoadRequest::Path { path } => Session::load(&path)?,
        LoadRequest::Text { text } => Session::from_json(&text)?,
    };
    let mut s = lock(&st);
    if let Some(e) = &s.execution {
        return Err(SessionError::ExecutionInProgress(e.plan).into());
    }
    *s = loaded;
    Ok(Json(
        json!({ "actions": s.domain.actions.len(), "problems": s.problems.len(), "plans": s.plans.len() }),
    ))
}
