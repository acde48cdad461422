//! JSON HTTP API over a loaded dataset.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::{Path as UrlPath, Query as UrlQuery, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use glyph_core::export::{apply_positions_sequence, apply_positions_state, layout_sequence_graph, layout_state_graph};
use glyph_core::layout::{LayoutError, Pins};
use glyph_core::query::{run_query, Query};
use glyph_core::stategraph::{ActionEdge, StateGraph, StateNode};

use crate::dataset::{Dataset, DatasetError, LevelData, LevelSummary};
use crate::sessions::{Sessions, View};

pub const SESSION_HEADER: &str = "x-glyph-session";
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(3600);

#[derive(Debug)]
pub struct AppState {
    pub dataset: Dataset,
    pub sessions: Sessions,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> ApiError {
        ApiError { status, message: message.into() }
    }

    fn unknown_level(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, format!("unknown level {id}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<LayoutError> for ApiError {
    fn from(e: LayoutError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn level<'a>(state: &'a AppState, id: &str) -> ApiResult<&'a LevelData> {
    state.dataset.levels.get(id).ok_or_else(|| ApiError::unknown_level(id))
}

fn session_token(headers: &HeaderMap) -> Option<String> {
    headers.get(SESSION_HEADER).and_then(|v| v.to_str().ok()).map(str::to_string)
}

fn flag(params: &BTreeMap<String, String>, name: &str) -> bool {
    params.get(name).is_some_and(|v| matches!(v.as_str(), "1" | "true" | "yes"))
}

fn session_pins(state: &AppState, headers: &HeaderMap, level: &str, view: View) -> Pins {
    session_token(headers).map(|t| state.sessions.pins(&t, level, view)).unwrap_or_default()
}

async fn list_levels(State(state): State<Arc<AppState>>) -> Json<Vec<LevelSummary>> {
    Json(state.dataset.index.levels.clone())
}

#[derive(Serialize)]
struct InfoResponse<'a> {
    level_id: &'a str,
    text: &'a str,
    config: &'a glyph_core::game::LevelConfig,
    trace_count: usize,
    sequence_count: usize,
}

async fn level_info(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let data = level(&state, &id)?;
    Ok(Json(InfoResponse {
        level_id: &id,
        text: &data.info_text,
        config: data.level.config(),
        trace_count: data.summary.trace_count,
        sequence_count: data.summary.sequence_count,
    })
    .into_response())
}

fn graph_of(data: &LevelData) -> StateGraph {
    // Only the topology is needed for re-layout.
    let doc = &data.state_graph;
    StateGraph {
        level_id: doc.level_id.clone(),
        nodes: doc
            .nodes
            .iter()
            .map(|n| StateNode {
                node_id: n.id,
                state: glyph_core::game::GameState::new(n.state.marker, Default::default()),
                visits: n.visits,
                starts: n.starts,
                terminations: n.terminations,
                class: n.class,
            })
            .collect(),
        edges: doc
            .edges
            .iter()
            .map(|e| ActionEdge { edge_id: e.id, from: e.from, to: e.to, action: e.action, traversals: e.traversals })
            .collect(),
    }
}

async fn state_graph(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    UrlQuery(params): UrlQuery<BTreeMap<String, String>>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let data = level(&state, &id)?;
    let pins = session_pins(&state, &headers, &id, View::State);
    if pins.is_empty() && !flag(&params, "relayout") {
        return Ok(Json(&data.state_graph).into_response());
    }
    let mut doc = data.state_graph.clone();
    if flag(&params, "relayout") {
        let cfg = state.dataset.index.config.state_layout;
        let graph = graph_of(data);
        let result = tokio::task::spawn_blocking(move || layout_state_graph(&graph, &cfg, &pins))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
        apply_positions_state(&mut doc, &result.positions);
    } else {
        for (&node, &[x, y]) in &pins {
            doc.nodes[node].x = x;
            doc.nodes[node].y = y;
        }
    }
    Ok(Json(doc).into_response())
}

async fn sequence_graph(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    UrlQuery(params): UrlQuery<BTreeMap<String, String>>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let data = level(&state, &id)?;
    let pins = session_pins(&state, &headers, &id, View::Sequence);
    let with_matrix = flag(&params, "matrix");
    let mut doc = if with_matrix { data.sequence_graph.clone() } else { data.sequence_graph.without_matrix() };
    if flag(&params, "relayout") {
        let cfg = state.dataset.index.config.sequence_layout;
        let matrix = data
            .sequence_graph
            .matrix
            .clone()
            .ok_or_else(|| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "dataset has no distance matrix"))?;
        let result = tokio::task::spawn_blocking(move || layout_sequence_graph(&matrix, &cfg, &pins))
            .await
            .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
        apply_positions_sequence(&mut doc, &result.positions);
        doc.final_stress = result.final_stress;
    } else {
        for (&node, &[x, y]) in &pins {
            doc.nodes[node].x = x;
            doc.nodes[node].y = y;
        }
    }
    Ok(Json(doc).into_response())
}

const QUERY_KEYS: [&str; 4] = ["top", "kth", "users", "seqs"];

async fn sequences(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    UrlQuery(params): UrlQuery<BTreeMap<String, String>>,
) -> ApiResult<Response> {
    let data = level(&state, &id)?;
    let given: Vec<(&String, &String)> = params.iter().filter(|(k, _)| QUERY_KEYS.contains(&k.as_str())).collect();
    let [(name, value)] = given.as_slice() else {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "give exactly one of top=K, kth=K, users=a,b or seqs=1,2",
        ));
    };
    let query: Query = format!("{name}={value}")
        .parse()
        .map_err(|e: glyph_core::query::QueryError| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let result = run_query(&data.level, &data.sequences, &data.paths, &query).map_err(|e| {
        let status = match e {
            glyph_core::query::QueryError::NotFound { .. } => StatusCode::NOT_FOUND,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.to_string())
    })?;
    Ok(Json(result).into_response())
}

#[derive(Debug, Deserialize)]
pub struct PinRequest {
    pub node_id: usize,
    pub x: f64,
    pub y: f64,
    pub view: View,
}

#[derive(Debug, Serialize)]
struct PinResponse {
    session: String,
    level_id: String,
    view: View,
    pins: Pins,
}

async fn post_pin(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
    Json(req): Json<PinRequest>,
) -> ApiResult<Response> {
    let data = level(&state, &id)?;
    let node_count = match req.view {
        View::State => data.state_graph.nodes.len(),
        View::Sequence => data.sequence_graph.nodes.len(),
    };
    if req.node_id >= node_count {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("no node {} in the {:?} view", req.node_id, req.view)));
    }
    if !(req.x.is_finite() && req.y.is_finite()) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "pin coordinates must be finite"));
    }
    let token = session_token(&headers).unwrap_or_else(Sessions::new_token);
    let pins = state.sessions.pin(&token, &id, req.view, req.node_id, [req.x, req.y]);
    let mut response = Json(PinResponse { session: token.clone(), level_id: id, view: req.view, pins }).into_response();
    if let Ok(value) = HeaderValue::from_str(&token) {
        response.headers_mut().insert(SESSION_HEADER, value);
    }
    Ok(response)
}

#[derive(Debug, Deserialize)]
struct ClearParams {
    view: View,
}

async fn clear_pins(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    UrlQuery(params): UrlQuery<ClearParams>,
    headers: HeaderMap,
) -> ApiResult<StatusCode> {
    level(&state, &id)?;
    if let Some(token) = session_token(&headers) {
        state.sessions.clear(&token, &id, params.view);
    }
    Ok(StatusCode::NO_CONTENT)
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "no such endpoint")
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/levels", get(list_levels))
        .route("/api/levels/{id}/info", get(level_info))
        .route("/api/levels/{id}/state-graph", get(state_graph))
        .route("/api/levels/{id}/sequence-graph", get(sequence_graph))
        .route("/api/levels/{id}/sequences", get(sequences))
        .route("/api/levels/{id}/pins", axum::routing::post(post_pin).delete(clear_pins))
        .fallback(not_found)
        .with_state(state)
}

pub fn app_state(dataset_dir: &Path, ttl: Duration) -> Result<Arc<AppState>, DatasetError> {
    let dataset = Dataset::load(dataset_dir)?;
    Ok(Arc::new(AppState { dataset, sessions: Sessions::new(ttl) }))
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server stopped: {0}")]
    Server(std::io::Error),
}

/// Loads the dataset and serves it until ctrl-c.
pub async fn serve(dataset_dir: &Path, addr: SocketAddr, ttl: Duration) -> Result<(), ServeError> {
    let state = app_state(dataset_dir, ttl)?;
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|source| ServeError::Bind { addr, source })?;
    tracing::info!(levels = state.dataset.levels.len(), %addr, "serving {}", dataset_dir.display());
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(ServeError::Server)
}
