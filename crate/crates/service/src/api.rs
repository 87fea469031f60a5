use std::collections::HashMap;
use std::future::Future;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use newscog::dialogue::{RegistrationSheet, SessionEngine};
use newscog::ingest::{NewsQuery, Topic};
use newscog::ml::{evaluate, TreeParams};
use newscog::Error;

use crate::config::{Resources, ServiceConfig};
use crate::pipeline;

/// Error payload for every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

fn status_of(e: &Error) -> (StatusCode, &'static str) {
    match e {
        Error::Validation(_) | Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => {
            (StatusCode::BAD_REQUEST, "validation")
        }
        Error::GenerationFailed(_) => (StatusCode::BAD_REQUEST, "generation_failed"),
        Error::Evaluation(_) => (StatusCode::BAD_REQUEST, "evaluation"),
        Error::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
        Error::Protocol(_) => (StatusCode::CONFLICT, "protocol"),
        Error::Transport { .. } => (StatusCode::BAD_GATEWAY, "transport"),
        Error::Contract(_) | Error::Io { .. } => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
    }
}

/// A finished response, kept as bytes so retries replay it exactly.
#[derive(Debug, Clone)]
struct Reply {
    status: StatusCode,
    body: Vec<u8>,
}

impl Reply {
    fn json(status: StatusCode, value: &impl Serialize) -> Self {
        match serde_json::to_vec(value) {
            Ok(body) => Reply { status, body },
            Err(e) => Reply::error(&Error::from(e)),
        }
    }

    fn ok(value: &impl Serialize) -> Self {
        Reply::json(StatusCode::OK, value)
    }

    fn error(e: &Error) -> Self {
        let (status, code) = status_of(e);
        if status.is_server_error() {
            log::error!("{e}");
        }
        let body = ErrorBody {
            code: code.into(),
            message: e.to_string(),
        };
        Reply {
            status,
            body: serde_json::to_vec(&body).unwrap_or_default(),
        }
    }
}

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        (
            self.status,
            [(header::CONTENT_TYPE, "application/json")],
            self.body,
        )
            .into_response()
    }
}

type Slot = Arc<tokio::sync::Mutex<Option<Reply>>>;

struct Inner {
    res: Resources,
    engine: SessionEngine,
    replies: Mutex<HashMap<String, Slot>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    pub fn new(res: Resources) -> Self {
        AppState(Arc::new(Inner {
            engine: res.engine(),
            res,
            replies: Mutex::default(),
        }))
    }

    pub fn resources(&self) -> &Resources {
        &self.0.res
    }

    /// Runs `work` on the blocking pool. With a request id, the first reply
    /// is cached and replayed for every retry under the same id; concurrent
    /// retries wait for the first to finish.
    async fn once<F>(&self, scope: &str, request_id: Option<String>, work: F) -> Reply
    where
        F: FnOnce(&AppState) -> newscog::Result<Reply> + Send + 'static,
    {
        let state = self.clone();
        let run = move || async move {
            tokio::task::spawn_blocking(move || work(&state).unwrap_or_else(|e| Reply::error(&e)))
                .await
                .unwrap_or_else(|e| {
                    Reply::error(&Error::Contract(format!("handler panicked: {e}")))
                })
        };
        let Some(rid) = request_id else {
            return run().await;
        };
        let slot = {
            let mut replies = self.0.replies.lock().unwrap_or_else(|e| e.into_inner());
            replies
                .entry(format!("{scope}\n{rid}"))
                .or_default()
                .clone()
        };
        let mut cached = slot.lock().await;
        if let Some(reply) = cached.as_ref() {
            return reply.clone();
        }
        let reply = run().await;
        if !reply.status.is_server_error() {
            *cached = Some(reply.clone());
        }
        reply
    }
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> newscog::Result<T> {
    let body = if body.iter().all(u8::is_ascii_whitespace) {
        b"{}".as_slice()
    } else {
        body
    };
    serde_json::from_slice(body).map_err(|e| Error::Validation(format!("request body: {e}")))
}

#[derive(Debug, Default, Deserialize)]
pub struct NewsParams {
    pub topic: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
}

fn parse_date(field: &str, value: Option<&str>) -> newscog::Result<Option<NaiveDate>> {
    value
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|e| Error::Validation(format!("{field}: '{v}' is not a date: {e}")))
        })
        .transpose()
}

async fn list_news(State(state): State<AppState>, Query(params): Query<NewsParams>) -> Reply {
    state
        .once("news", None, move |s| {
            let query = NewsQuery {
                topic: params
                    .topic
                    .as_deref()
                    .filter(|t| !t.is_empty())
                    .map(str::parse::<Topic>)
                    .transpose()?,
                from: parse_date("from", params.from.as_deref())?,
                to: parse_date("to", params.to.as_deref())?,
            };
            Ok(Reply::ok(&s.resources().news.query(&query)?))
        })
        .await
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreateSession {
    pub sheet: RegistrationSheet,
    pub news_id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub request_id: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub script_id: String,
    pub news_id: String,
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Reply {
    let req: CreateSession = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return Reply::error(&e),
    };
    let rid = req.request_id.clone();
    state
        .once("sessions", rid, move |s| {
            req.sheet.validate()?;
            let script = pipeline::script_for(s.resources(), &req.news_id, req.seed)?;
            let created = SessionCreated {
                script_id: script.id.clone(),
                news_id: script.news_id.clone(),
                session_id: s.0.engine.create_session(req.sheet, script)?,
            };
            Ok(Reply::json(StatusCode::CREATED, &created))
        })
        .await
}

async fn next_prompt(State(state): State<AppState>, Path(id): Path<String>) -> Reply {
    state
        .once("next", None, move |s| {
            Ok(Reply::ok(&s.0.engine.next_prompt(&id)?))
        })
        .await
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmitAnswer {
    pub text: String,
    #[serde(default)]
    pub request_id: Option<String>,
}

async fn submit_answer(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Reply {
    let req: SubmitAnswer = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return Reply::error(&e),
    };
    let scope = format!("answer/{id}");
    state
        .once(&scope, req.request_id.clone(), move |s| {
            Ok(Reply::ok(&s.0.engine.submit_answer(&id, &req.text)?))
        })
        .await
}

/// The stored report, byte for byte.
async fn report(State(state): State<AppState>, Path(id): Path<String>) -> Reply {
    state
        .once("report", None, move |s| {
            match s.resources().sessions.report_bytes(&id)? {
                Some(body) => Ok(Reply {
                    status: StatusCode::OK,
                    body,
                }),
                None => Err(Error::Protocol(format!("session '{id}' has not completed"))),
            }
        })
        .await
}

#[derive(Debug, Default, Deserialize)]
struct Idempotent {
    #[serde(default)]
    request_id: Option<String>,
}

async fn build_dataset(State(state): State<AppState>, body: Bytes) -> Reply {
    let req: Idempotent = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return Reply::error(&e),
    };
    state
        .once("dataset", req.request_id, |s| {
            Ok(Reply::ok(&pipeline::build_dataset(s.resources())?.1))
        })
        .await
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainRequest {
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default)]
    pub min_leaf: Option<usize>,
    #[serde(default)]
    pub request_id: Option<String>,
}

impl TrainRequest {
    fn params(&self) -> TreeParams {
        let d = TreeParams::default();
        TreeParams {
            max_depth: self.max_depth.unwrap_or(d.max_depth),
            min_leaf: self.min_leaf.unwrap_or(d.min_leaf),
        }
    }
}

async fn train(State(state): State<AppState>, body: Bytes) -> Reply {
    let req: TrainRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return Reply::error(&e),
    };
    state
        .once("train", req.request_id.clone(), move |s| {
            let res = s.resources();
            let dataset = pipeline::load_dataset(&res.dataset_path())?;
            let outcome = pipeline::train(&dataset, req.params())?;
            pipeline::save_tree(&outcome.tree, &res.tree_path())?;
            Ok(Reply::ok(&outcome))
        })
        .await
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluateRequest {
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default)]
    pub request_id: Option<String>,
}

async fn evaluate_model(State(state): State<AppState>, body: Bytes) -> Reply {
    let req: EvaluateRequest = match parse_body(&body) {
        Ok(r) => r,
        Err(e) => return Reply::error(&e),
    };
    state
        .once("evaluate", req.request_id.clone(), move |s| {
            let dataset = pipeline::load_dataset(&s.resources().dataset_path())?;
            let params = TrainRequest {
                max_depth: req.max_depth,
                ..Default::default()
            }
            .params();
            let report = evaluate(&dataset, req.k, req.seed, params)?;
            Ok(Reply::ok(&serde_json::json!({
                "rendered": report.render(),
                "report": report,
            })))
        })
        .await
}

/// Handlers only exist once resources are loaded, so answering at all
/// means the lexicon is in memory.
async fn ready(State(state): State<AppState>) -> Reply {
    Reply::ok(&serde_json::json!({
        "status": "ok",
        "lexicon_entries": state.resources().lexicon.len(),
    }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/ready", get(ready))
        .route("/news", get(list_news))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/next", get(next_prompt))
        .route("/sessions/{id}/answer", post(submit_answer))
        .route("/sessions/{id}/report", get(report))
        .route("/dataset/build", post(build_dataset))
        .route("/ml/train", post(train))
        .route("/ml/evaluate", post(evaluate_model))
        .with_state(state)
}

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error("cannot load resources: {0}")]
    Config(#[from] Error),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
}

/// A server running on a background task.
pub struct ServiceHandle {
    pub addr: SocketAddr,
    shutdown: oneshot::Sender<()>,
    task: JoinHandle<std::io::Result<()>>,
}

impl ServiceHandle {
    /// Stops accepting, lets in-flight requests finish, then returns.
    pub async fn shutdown(self) -> std::io::Result<()> {
        let _ = self.shutdown.send(());
        self.task.await.map_err(std::io::Error::other)?
    }
}

async fn start(
    config: &ServiceConfig,
    addr: SocketAddr,
    stop: impl Future<Output = ()> + Send + 'static,
) -> Result<(SocketAddr, JoinHandle<std::io::Result<()>>), StartupError> {
    let config = config.clone();
    let res = tokio::task::spawn_blocking(move || config.load())
        .await
        .map_err(|e| Error::Contract(format!("loader panicked: {e}")))??;
    let listener = TcpListener::bind(addr)
        .await
        .map_err(|source| StartupError::Bind { addr, source })?;
    let local = listener
        .local_addr()
        .map_err(|source| StartupError::Bind { addr, source })?;
    let app = router(AppState::new(res));
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(stop)
            .await
    });
    log::info!("listening on {local}");
    Ok((local, task))
}

/// Loads resources, binds and serves in the background.
pub async fn spawn(
    config: &ServiceConfig,
    addr: SocketAddr,
) -> Result<ServiceHandle, StartupError> {
    let (tx, rx) = oneshot::channel();
    let (addr, task) = start(config, addr, async {
        let _ = rx.await;
    })
    .await?;
    Ok(ServiceHandle {
        addr,
        shutdown: tx,
        task,
    })
}

async fn termination() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
    log::info!("shutting down");
}

/// Serves until SIGINT or SIGTERM.
pub async fn serve(config: &ServiceConfig, addr: SocketAddr) -> Result<(), StartupError> {
    let (_, task) = start(config, addr, termination()).await?;
    task.await
        .map_err(|e| Error::Contract(format!("server task failed: {e}")))?
        .map_err(|source| StartupError::Bind { addr, source })
}
