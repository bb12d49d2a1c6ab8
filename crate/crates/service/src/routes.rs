use std::path::PathBuf;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use relim_core::certificate::{build_certificate, Certificate};
use relim_core::engine::{strength_order, PosetReport, SpeedupOptions};
use relim_core::problem::{format_problem, parse_problem, zero_round_solvable, LabelMap, ProblemJson};
use relim_core::{Problem, Side};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::Config;
use crate::error::ApiError;
use crate::jobs::Jobs;
use crate::session::{derive, NodeOp, NodeView, SessionError, SessionStore};

pub struct AppState {
    pub config: Config,
    pub store: SessionStore,
    pub jobs: Jobs,
    cert_dir: PathBuf,
}

impl AppState {
    pub fn new(config: Config) -> Result<Self, SessionError> {
        let opts = SpeedupOptions { alphabet_cap: config.alphabet_cap, cancel: None };
        let store = SessionStore::new(config.data_dir.join("sessions"), opts)?;
        let cert_dir = config.data_dir.join("certificates");
        std::fs::create_dir_all(&cert_dir)?;
        Ok(AppState { jobs: Jobs::new(config.job_workers), store, cert_dir, config })
    }

    fn engine_opts(&self, cancel: Option<Arc<AtomicBool>>) -> SpeedupOptions {
        SpeedupOptions { alphabet_cap: self.config.alphabet_cap, cancel }
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/spec", get(openapi_doc))
        .route("/problems/parse", post(parse))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/nodes/{n}/speedup", post(speedup_node))
        .route("/sessions/{id}/nodes/{n}/merge", post(merge_node))
        .route("/sessions/{id}/nodes/{n}/zero-round", post(zero_round))
        .route("/sessions/{id}/nodes/{n}/strength-order", post(poset))
        .route("/certificates/build", post(build_cert))
        .route("/certificates/{id}", get(get_cert))
        .route("/jobs/{id}", get(job_status))
        .route("/jobs/{id}/cancel", post(job_cancel))
        .with_state(state)
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(format!("request body: {e}")))
}

/// Like [`body`], with an empty body meaning the default.
fn body_or_default<T: DeserializeOwned + Default>(bytes: &Bytes) -> ApiResult<T> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        Ok(T::default())
    } else {
        body(bytes)
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::Internal(e.to_string()))?
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParseRequest {
    text: Option<String>,
    problem: Option<ProblemJson>,
}

impl ParseRequest {
    fn problem(self) -> ApiResult<Problem> {
        match (self.text, self.problem) {
            (Some(text), None) => Ok(parse_problem(&text)?),
            (None, Some(json)) => Ok(Problem::try_from(json)?),
            _ => Err(ApiError::BadRequest("give exactly one of `text` and `problem`".into())),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct ParsedProblem {
    pub problem: ProblemJson,
    pub text: String,
    pub hash: String,
}

impl From<&Problem> for ParsedProblem {
    fn from(p: &Problem) -> Self {
        ParsedProblem { problem: ProblemJson::from(p), text: format_problem(p), hash: p.digest() }
    }
}

async fn parse(bytes: Bytes) -> ApiResult<Json<ParsedProblem>> {
    let p = body::<ParseRequest>(&bytes)?.problem()?;
    Ok(Json(ParsedProblem::from(&p)))
}

async fn create_session(State(st): State<Shared>, bytes: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let p = body::<ParseRequest>(&bytes)?.problem()?;
    let handle = st.store.create(p)?;
    let view = handle.lock().await.view();
    tracing::info!(session = %view.id, "session created");
    Ok((StatusCode::CREATED, Json(json!(view))))
}

async fn get_session(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let handle = st.store.get(&id)?;
    let view = handle.lock().await.view();
    Ok(Json(json!(view)))
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct SpeedupRequest {
    #[serde(rename = "async")]
    background: bool,
}

/// Computes a child outside the session lock, then records it.
async fn grow(st: Shared, id: String, parent: usize, op: NodeOp, cancel: Option<Arc<AtomicBool>>) -> ApiResult<NodeView> {
    let handle = st.store.get(&id)?;
    let problem = handle.lock().await.node(parent)?.problem.clone();
    let opts = st.engine_opts(cancel);
    let op2 = op.clone();
    let child = blocking(move || derive(&problem, &op2, &opts).map_err(ApiError::from)).await?;
    let mut session = handle.lock().await;
    let n = st.store.record(&mut session, parent, op, child)?;
    Ok(session.nodes[n].view())
}

async fn speedup_node(
    State(st): State<Shared>,
    Path((id, n)): Path<(String, usize)>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: SpeedupRequest = body_or_default(&bytes)?;
    st.store.get(&id)?.lock().await.node(n)?;
    if req.background {
        let st2 = st.clone();
        let job = st.jobs.spawn("speedup", move |cancel| async move {
            let node = grow(st2, id, n, NodeOp::Speedup, Some(cancel)).await?;
            Ok(json!({ "node": node }))
        });
        return Ok((StatusCode::ACCEPTED, Json(json!({ "job": job }))));
    }
    let node = grow(st, id, n, NodeOp::Speedup, None).await?;
    Ok((StatusCode::CREATED, Json(json!({ "node": node }))))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MergeRequest {
    mapping: LabelMap,
}

async fn merge_node(
    State(st): State<Shared>,
    Path((id, n)): Path<(String, usize)>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: MergeRequest = body(&bytes)?;
    let handle = st.store.get(&id)?;
    let mut session = handle.lock().await;
    let parent = session.node(n)?;
    if let Some(bad) = req.mapping.keys().find(|k| parent.problem.label_id(k).is_none()) {
        return Err(ApiError::BadRequest(format!("label {bad:?} is not in the alphabet of node {n}")));
    }
    let op = NodeOp::Merge { mapping: req.mapping };
    let merged = derive(&parent.problem, &op, st.store.options())?;
    if merged.digest() == parent.hash {
        return Ok((StatusCode::OK, Json(json!({ "node": parent.view(), "unchanged": true }))));
    }
    let child = st.store.record(&mut session, n, op, merged)?;
    Ok((StatusCode::CREATED, Json(json!({ "node": session.nodes[child].view(), "unchanged": false }))))
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct SideRequest {
    side: Option<Side>,
}

async fn zero_round(
    State(st): State<Shared>,
    Path((id, n)): Path<(String, usize)>,
    bytes: Bytes,
) -> ApiResult<Json<Value>> {
    let side = body_or_default::<SideRequest>(&bytes)?.side.unwrap_or(Side::Active);
    let p = st.store.get(&id)?.lock().await.node(n)?.problem.clone();
    let report = blocking(move || Ok(zero_round_solvable(&p, side).to_json(&p, side))).await?;
    Ok(Json(json!(report)))
}

async fn poset(State(st): State<Shared>, Path((id, n)): Path<(String, usize)>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let side = body_or_default::<SideRequest>(&bytes)?.side.unwrap_or(Side::Passive);
    let p = st.store.get(&id)?.lock().await.node(n)?.problem.clone();
    let report = PosetReport::new(&p, &strength_order(&p, side));
    Ok(Json(json!({ "side": side, "poset": report })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CertRequest {
    delta: u32,
    #[serde(rename = "maxT")]
    max_t: u32,
    #[serde(default, rename = "async")]
    background: bool,
}

fn cert_id(c: &Certificate) -> String {
    c.digest[..16].to_string()
}

async fn make_cert(st: Shared, delta: u32, max_t: u32, cancel: Option<Arc<AtomicBool>>) -> ApiResult<Value> {
    let opts = st.engine_opts(cancel);
    let cert = blocking(move || {
        build_certificate(delta, max_t, &opts).map_err(|e| match e {
            relim_core::certificate::CertificateError::Engine(e) => ApiError::from(e),
            other => ApiError::BadRequest(other.to_string()),
        })
    })
    .await?;
    let id = cert_id(&cert);
    let path = st.cert_dir.join(format!("{id}.json"));
    tokio::fs::write(&path, cert.to_json()).await.map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(json!({ "id": id, "rounds_exceeded": cert.rounds_exceeded(), "certificate": cert }))
}

async fn build_cert(State(st): State<Shared>, bytes: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: CertRequest = body(&bytes)?;
    if req.delta == 0 {
        return Err(ApiError::BadRequest("delta must be at least 1".into()));
    }
    if req.background {
        let st2 = st.clone();
        let job = st.jobs.spawn("certificate", move |cancel| make_cert(st2, req.delta, req.max_t, Some(cancel)));
        return Ok((StatusCode::ACCEPTED, Json(json!({ "job": job }))));
    }
    Ok((StatusCode::CREATED, Json(make_cert(st, req.delta, req.max_t, None).await?)))
}

async fn get_cert(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    if id.len() != 16 || !id.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(ApiError::NotFound(format!("unknown certificate {id:?}")));
    }
    let text = tokio::fs::read_to_string(st.cert_dir.join(format!("{id}.json")))
        .await
        .map_err(|_| ApiError::NotFound(format!("unknown certificate {id:?}")))?;
    let cert: Value = serde_json::from_str(&text).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Json(cert))
}

async fn job_status(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = st.jobs.status(&id).ok_or_else(|| ApiError::NotFound(format!("unknown job {id:?}")))?;
    Ok(Json(json!(s)))
}

async fn job_cancel(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = st.jobs.cancel(&id).ok_or_else(|| ApiError::NotFound(format!("unknown job {id:?}")))?;
    Ok(Json(json!(s)))
}

async fn openapi_doc() -> Json<Value> {
    Json(crate::openapi::document())
}
