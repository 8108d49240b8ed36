//! JSON HTTP API over the session store and the solvers.

use std::future::Future;
use std::sync::Arc;

use ahp_core::{
    ConsistencyReport, PowerIteration, PriorityVector, TransitivityViolation,
};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};

use crate::error::{AhpError, Result};
use crate::format::{parse_json_document, MatrixDocument};
use crate::report::{build_group, GroupReport, LlsReport, Method, SolveReport, EQUIVALENCE_TOL};
use crate::store::{DecisionSession, NewSession, SessionStore};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
}

impl IntoResponse for AhpError {
    fn into_response(self) -> Response {
        let status = match &self {
            AhpError::Parse { .. } | AhpError::Validation(_) | AhpError::Invalid(_) => StatusCode::BAD_REQUEST,
            AhpError::NotFound(_) => StatusCode::NOT_FOUND,
            AhpError::Conflict { .. } => StatusCode::CONFLICT,
            AhpError::Incomplete(_) => StatusCode::UNPROCESSABLE_ENTITY,
            AhpError::Io { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = serde_json::json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (status, Json(body)).into_response()
    }
}

/// Routes without CORS; see [`app`].
pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/sessions", post(create_session).get(list_sessions))
        .route("/api/v1/sessions/{id}", get(get_session).delete(delete_session))
        .route("/api/v1/sessions/{id}/experts/{expert}/judgments", put(put_judgment))
        .route("/api/v1/sessions/{id}/priorities", get(session_priorities))
        .route("/api/v1/sessions/{id}/group", get(session_group))
        .route("/api/v1/solve", post(solve))
        .route("/api/v1/group", post(group))
        .with_state(state)
}

/// Full application; `origins` empty allows any origin.
pub fn app(store: Arc<SessionStore>, origins: &[String]) -> Result<Router> {
    let allow = if origins.is_empty() {
        AllowOrigin::from(Any)
    } else {
        let values = origins
            .iter()
            .map(|o| HeaderValue::from_str(o).map_err(|_| AhpError::Invalid(format!("bad CORS origin `{o}`"))))
            .collect::<Result<Vec<_>>>()?;
        AllowOrigin::list(values)
    };
    let cors = CorsLayer::new()
        .allow_origin(allow)
        .allow_methods(Any)
        .allow_headers(Any)
        .expose_headers([header::ETAG]);
    Ok(router(AppState { store }).layer(cors))
}

/// Serves until `shutdown` resolves, then flushes the store.
pub async fn serve(
    listener: TcpListener,
    store: Arc<SessionStore>,
    origins: &[String],
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<()> {
    let app = app(store.clone(), origins)?;
    let addr = listener.local_addr().map_err(|e| AhpError::io("listener", e))?;
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|e| AhpError::io(addr.to_string(), e))?;
    store.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub expert: usize,
    pub judged: usize,
    pub total: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    #[serde(flatten)]
    pub session: DecisionSession,
    pub progress: Vec<Progress>,
}

impl From<DecisionSession> for SessionView {
    fn from(session: DecisionSession) -> Self {
        let progress = session
            .experts
            .iter()
            .enumerate()
            .map(|(expert, e)| Progress {
                expert,
                judged: e.matrix.judged_count(),
                total: e.matrix.total_pairs(),
                complete: e.matrix.is_complete(),
            })
            .collect();
        SessionView { session, progress }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JudgmentRequest {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Feedback after a judgment write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentUpdate {
    pub session_id: String,
    pub version: u64,
    pub expert: usize,
    /// Row-major matrix; `null` marks pairs not judged yet.
    pub matrix: Vec<Vec<Option<f64>>>,
    pub progress: Progress,
    pub transitivity_violations: Vec<TransitivityViolation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priorities: Option<PriorityVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertPriorities {
    pub expert: usize,
    pub name: String,
    pub alpha: f64,
    pub report: SolveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionPriorities {
    pub session_id: String,
    pub method: Method,
    pub experts: Vec<ExpertPriorities>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct MethodQuery {
    pub method: Option<String>,
}

impl MethodQuery {
    fn method(&self, default: Method) -> Result<Method> {
        match self.method.as_deref() {
            None => Ok(default),
            Some("lls") => Ok(Method::Lls),
            Some("se") => Ok(Method::Se),
            Some("both") => Ok(Method::Both),
            Some(other) => Err(AhpError::Invalid(format!("unknown method `{other}`; expected lls, se or both"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRequest {
    pub matrices: Vec<MatrixDocument>,
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub names: Option<Vec<String>>,
}

fn body<T: serde::de::DeserializeOwned>(bytes: &Bytes) -> Result<T> {
    let text = std::str::from_utf8(bytes).map_err(|e| AhpError::parse("body", e.to_string()))?;
    parse_json_document(text)
}

fn if_match(headers: &HeaderMap) -> Result<Option<u64>> {
    let Some(value) = headers.get(header::IF_MATCH) else { return Ok(None) };
    let text = value.to_str().unwrap_or_default().trim();
    let text = text.strip_prefix("W/").unwrap_or(text).trim_matches('"');
    text.parse()
        .map(Some)
        .map_err(|_| AhpError::Invalid(format!("If-Match must be a session version, got `{text}`")))
}

fn with_etag(version: u64, response: impl IntoResponse) -> Response {
    let mut response = response.into_response();
    let value = HeaderValue::from_str(&format!("\"{version}\"")).expect("digits are valid header text");
    response.headers_mut().insert(header::ETAG, value);
    response
}

fn parse_expert(raw: &str) -> Result<usize> {
    raw.parse().map_err(|_| AhpError::NotFound(format!("expert `{raw}`")))
}

async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn create_session(State(state): State<AppState>, bytes: Bytes) -> Result<Response> {
    let request: NewSession = body(&bytes)?;
    let session = state.store.create(request)?;
    let version = session.version;
    Ok(with_etag(version, (StatusCode::CREATED, Json(SessionView::from(session)))))
}

async fn list_sessions(State(state): State<AppState>) -> Json<Vec<SessionView>> {
    Json(state.store.list().into_iter().map(SessionView::from).collect())
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response> {
    let session = state.store.get(&id)?;
    Ok(with_etag(session.version, Json(SessionView::from(session))))
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode> {
    state.store.delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn put_judgment(
    State(state): State<AppState>,
    Path((id, expert)): Path<(String, String)>,
    headers: HeaderMap,
    bytes: Bytes,
) -> Result<Response> {
    let expert = parse_expert(&expert)?;
    let request: JudgmentRequest = body(&bytes)?;
    let expected = if_match(&headers)?;
    let session = state.store.update_judgment(&id, expert, request.i, request.j, request.value, expected)?;
    let e = session.expert(expert)?;
    let progress = SessionView::from(session.clone()).progress.swap_remove(expert);
    let mut update = JudgmentUpdate {
        session_id: session.id.clone(),
        version: session.version,
        expert,
        matrix: e.matrix.rows(),
        progress,
        transitivity_violations: e.matrix.transitivity_violations(session.settings.consistency_tol),
        priorities: None,
        consistency: None,
        mu: None,
        lambda_max: None,
    };
    if e.matrix.is_complete() {
        let a = e.matrix.to_matrix()?;
        let lls = LlsReport::new(&a, session.settings.consistency_tol);
        let se = PowerIteration::default().solve(&a);
        update.priorities = Some(lls.priorities);
        update.consistency = Some(lls.consistency);
        update.mu = Some(se.mu);
        update.lambda_max = Some(se.lambda_max);
    }
    Ok(with_etag(session.version, Json(update)))
}

fn complete_matrix(session: &DecisionSession, expert: usize) -> Result<ahp_core::JudgmentMatrix> {
    let e = &session.experts[expert];
    if !e.matrix.is_complete() {
        return Err(AhpError::Incomplete(format!(
            "expert {expert} ({}) has judged {} of {} pairs",
            e.name,
            e.matrix.judged_count(),
            e.matrix.total_pairs()
        )));
    }
    Ok(e.matrix.to_matrix()?.with_labels(session.labels.clone())?)
}

async fn session_priorities(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<MethodQuery>,
) -> Result<Json<SessionPriorities>> {
    let session = state.store.get(&id)?;
    let method = query.method(session.settings.method)?;
    let experts = (0..session.experts.len())
        .map(|k| {
            let a = complete_matrix(&session, k)?;
            let e = &session.experts[k];
            Ok(ExpertPriorities {
                expert: k,
                name: e.name.clone(),
                alpha: e.alpha,
                report: SolveReport::new(&a, method, session.settings.consistency_tol),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Json(SessionPriorities { session_id: session.id, method, experts }))
}

async fn session_group(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<GroupReport>> {
    let session = state.store.get(&id)?;
    let matrices = (0..session.experts.len())
        .map(|k| complete_matrix(&session, k))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = session.experts.iter().map(|e| e.name.clone()).collect();
    let alphas = session.experts.iter().map(|e| e.alpha).collect();
    let g = build_group(matrices, Some(alphas))?;
    Ok(Json(GroupReport::new(&g, Some(&names), session.settings.consistency_tol, Some(EQUIVALENCE_TOL))))
}

async fn solve(Query(query): Query<MethodQuery>, bytes: Bytes) -> Result<Json<SolveReport>> {
    let method = query.method(Method::Both)?;
    let a = body::<MatrixDocument>(&bytes)?.into_matrix(false)?;
    Ok(Json(SolveReport::new(&a, method, ahp_core::lls::DEFAULT_CONSISTENCY_TOL)))
}

async fn group(bytes: Bytes) -> Result<Json<GroupReport>> {
    let request: GroupRequest = body(&bytes)?;
    if let Some(names) = &request.names {
        if names.len() != request.matrices.len() {
            return Err(AhpError::Invalid(format!(
                "{} matrices but {} names",
                request.matrices.len(),
                names.len()
            )));
        }
    }
    let matrices = request
        .matrices
        .into_iter()
        .map(|d| d.into_matrix(false))
        .collect::<Result<Vec<_>>>()?;
    let g = build_group(matrices, request.weights)?;
    Ok(Json(GroupReport::new(
        &g,
        request.names.as_deref(),
        ahp_core::lls::DEFAULT_CONSISTENCY_TOL,
        Some(EQUIVALENCE_TOL),
    )))
}
