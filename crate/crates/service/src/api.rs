//! HTTP JSON API over an [`Engine`].

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dynsched_core::{Instance, ProblemKind, Value};
use dynsched_solver::SolveLimits;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::engine::{ConstrainRequest, Engine};
use crate::error::{Result, ServiceError};

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.http_status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self.body())).into_response()
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub kind: ProblemKind,
    pub instance: BTreeMap<String, Value>,
}

#[derive(Debug, Default, Deserialize)]
pub struct SolveRequest {
    #[serde(default)]
    pub limits: Option<SolveLimits>,
}

#[derive(Debug, Deserialize)]
pub struct EvalRequest {
    pub testset: String,
    pub backend: String,
    #[serde(default)]
    pub threads: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct ParaphraseRequest {
    pub text: String,
    #[serde(default = "default_variants")]
    pub n: usize,
}

fn default_variants() -> usize {
    4
}

#[derive(Debug, Serialize)]
struct Acknowledged {
    ok: bool,
}

type Shared = State<Arc<Engine>>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest(e.to_string()))
}

/// Like [`parse`], but an empty or `null` body gives the default value.
fn parse_or_default<T: DeserializeOwned + Default>(body: &Bytes) -> Result<T> {
    let text = String::from_utf8_lossy(body);
    if text.trim().is_empty() || text.trim() == "null" {
        Ok(T::default())
    } else {
        parse(body)
    }
}

/// Runs engine work off the async executor.
async fn blocking<T, F>(engine: Arc<Engine>, f: F) -> Result<Json<T>>
where
    T: Send + 'static,
    F: FnOnce(&Engine) -> Result<T> + Send + 'static,
{
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ServiceError::Io(format!("worker failed: {e}")))?
        .map(Json)
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/sessions", get(list).post(create))
        .route("/sessions/{id}", get(info))
        .route("/sessions/{id}/solve", post(solve))
        .route("/sessions/{id}/constraints", post(constrain))
        .route("/sessions/{id}/accept", post(accept))
        .route("/sessions/{id}/discard", post(discard))
        .route("/sessions/{id}/schedule", get(schedule))
        .route("/sessions/{id}/diff", get(diff))
        .route("/sessions/{id}/trace", get(trace))
        .route("/sessions/{id}/history", get(history))
        .route("/eval/run", post(eval_run))
        .route("/paraphrase", post(paraphrase))
        .with_state(engine)
}

async fn health(State(e): Shared) -> Json<serde_json::Value> {
    Json(json!({ "status": "ok", "backend": e.backend_name() }))
}

async fn list(State(e): Shared) -> impl IntoResponse {
    blocking(e, |e| Ok(e.list())).await
}

async fn create(State(e): Shared, body: Bytes) -> Result<impl IntoResponse> {
    let req: CreateRequest = parse(&body)?;
    let info = blocking(e, move |e| e.create_session(Instance::new(req.kind, req.instance))).await?;
    Ok((StatusCode::CREATED, info))
}

async fn info(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.session_info(&id)).await
}

async fn solve(State(e): Shared, Path(id): Path<String>, body: Bytes) -> Result<impl IntoResponse> {
    let req: SolveRequest = parse_or_default(&body)?;
    blocking(e, move |e| e.solve(&id, req.limits)).await
}

async fn constrain(State(e): Shared, Path(id): Path<String>, body: Bytes) -> Result<impl IntoResponse> {
    let req: ConstrainRequest = parse(&body)?;
    blocking(e, move |e| e.constrain(&id, &req)).await
}

async fn accept(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.accept(&id)).await
}

async fn discard(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.discard(&id).map(|()| Acknowledged { ok: true })).await
}

async fn schedule(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.schedule(&id)).await
}

async fn diff(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.diff(&id)).await
}

async fn trace(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.trace(&id)).await
}

async fn history(State(e): Shared, Path(id): Path<String>) -> impl IntoResponse {
    blocking(e, move |e| e.history(&id)).await
}

async fn eval_run(State(e): Shared, body: Bytes) -> Result<impl IntoResponse> {
    let req: EvalRequest = parse(&body)?;
    blocking(e, move |e| {
        let run = e.eval_run(&req.testset, &req.backend, req.threads)?;
        Ok(json!({ "backend": run.backend, "table": run.table, "rendered": run.table.render() }))
    })
    .await
}

async fn paraphrase(State(e): Shared, body: Bytes) -> Result<impl IntoResponse> {
    let req: ParaphraseRequest = parse(&body)?;
    blocking(e, move |e| e.paraphrase(&req.text, req.n)).await
}

/// Serves the API until interrupted.
pub async fn serve(engine: Arc<Engine>, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
