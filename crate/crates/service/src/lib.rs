//! HTTP facade over consultation sessions.
//!
//! Sessions live in memory only and are dropped on restart or after sitting
//! idle longer than the configured timeout. Goals and variables are addressed
//! by name on the wire.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use macie_core::engine::{Event, Verdict};
use macie_core::{KnowledgeBase, Session, TruthValue};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tower_http::cors::CorsLayer;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(60 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    /// Origin allowed to call the API from a browser, if any.
    pub cors_origin: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            idle_timeout: DEFAULT_IDLE_TIMEOUT,
            cors_origin: None,
        }
    }
}

struct Entry {
    session: Session,
    last_access: Instant,
}

pub struct AppState {
    kb: Option<Arc<KnowledgeBase>>,
    fingerprint: Option<String>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Entry>>>>,
    config: ServiceConfig,
}

impl AppState {
    pub fn new(kb: Option<KnowledgeBase>, config: ServiceConfig) -> Arc<Self> {
        let fingerprint = kb.as_ref().map(fingerprint);
        Arc::new(AppState {
            kb: kb.map(Arc::new),
            fingerprint,
            sessions: Mutex::new(HashMap::new()),
            config,
        })
    }

    fn lookup(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ApiError> {
        let mut sessions = self.sessions.lock().unwrap();
        let timeout = self.config.idle_timeout;
        sessions.retain(|_, e| {
            e.try_lock()
                .map(|e| e.last_access.elapsed() <= timeout)
                .unwrap_or(true)
        });
        sessions
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no session {id:?}")))
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }
}

/// First 16 hex digits of the SHA-256 of the canonical knowledge-base file.
pub fn fingerprint(kb: &KnowledgeBase) -> String {
    let digest = Sha256::digest(kb.to_json().as_bytes());
    hex::encode(digest)[..16].to_string()
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ViableGoal {
    pub goal: String,
    pub sum: i64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EliminatedGoal {
    pub goal: String,
    pub by: String,
    pub gap: i64,
    pub bound: i64,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub event: String,
    pub variable: Option<String>,
    pub value: Option<String>,
    pub goal: Option<String>,
    pub by: Option<String>,
}

/// Everything a client needs to render a session.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Snapshot {
    pub id: String,
    pub status: String,
    pub question: Option<String>,
    pub conclusion: Option<String>,
    pub viable: Vec<ViableGoal>,
    pub eliminated: Vec<EliminatedGoal>,
    pub assignment: BTreeMap<String, String>,
    pub transcript: Vec<TranscriptEntry>,
}

pub fn snapshot(id: &str, s: &Session) -> Snapshot {
    let kb = s.kb();
    let sums = s.sums();
    let verdict = s.verdict();
    let (question, conclusion) = match verdict {
        Verdict::NeedsInput(k) => (Some(kb.input_name(k).to_string()), None),
        Verdict::Concluded(g) | Verdict::Unconfirmed(g) => {
            (None, Some(kb.goal_name(g).to_string()))
        }
    };
    let transcript = s
        .transcript()
        .iter()
        .map(|e| match *e {
            Event::Answered { variable, value } => TranscriptEntry {
                event: "answered".into(),
                variable: Some(kb.input_name(variable).into()),
                value: Some(value.as_str().into()),
                goal: None,
                by: None,
            },
            Event::Eliminated(el) => TranscriptEntry {
                event: "eliminated".into(),
                variable: None,
                value: None,
                goal: Some(kb.goal_name(el.goal).into()),
                by: Some(kb.goal_name(el.dominator).into()),
            },
        })
        .collect();
    Snapshot {
        id: id.to_string(),
        status: verdict.status().to_string(),
        question,
        conclusion,
        viable: s
            .viable()
            .into_iter()
            .map(|g| ViableGoal {
                goal: kb.goal_name(g).into(),
                sum: sums[g],
            })
            .collect(),
        eliminated: s
            .eliminations()
            .iter()
            .map(|e| EliminatedGoal {
                goal: kb.goal_name(e.goal).into(),
                by: kb.goal_name(e.dominator).into(),
                gap: e.gap,
                bound: e.bound,
            })
            .collect(),
        assignment: (0..kb.n_inputs())
            .map(|k| {
                (
                    kb.input_name(k).to_string(),
                    s.assignment().get(k).as_str().to_string(),
                )
            })
            .collect(),
        transcript,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    #[serde(default)]
    known: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct AnswerRequest {
    variable: String,
    value: String,
}

#[derive(Deserialize)]
struct JustificationQuery {
    goal: Option<String>,
}

fn parse_answer(token: &str) -> Result<TruthValue, ApiError> {
    match token {
        "true" => Ok(TruthValue::True),
        "false" => Ok(TruthValue::False),
        "unavailable" => Ok(TruthValue::Unavailable),
        other => Err(ApiError::unprocessable(format!(
            "value must be \"true\", \"false\" or \"unavailable\", got {other:?}"
        ))),
    }
}

fn apply_answer(s: &mut Session, variable: &str, value: &str) -> Result<(), ApiError> {
    let value = parse_answer(value)?;
    let k = s
        .kb()
        .input_index(variable)
        .ok_or_else(|| ApiError::unprocessable(format!("unknown variable {variable:?}")))?;
    s.answer(k, value)
        .map(|_| ())
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    match &state.kb {
        Some(kb) => Json(json!({
            "status": "ok",
            "inputs": kb.n_inputs(),
            "goals": kb.m_goals(),
            "fingerprint": state.fingerprint,
        }))
        .into_response(),
        None => ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no knowledge base loaded")
            .into_response(),
    }
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    body: Bytes,
) -> Result<(StatusCode, Json<Snapshot>), ApiError> {
    let kb = state.kb.clone().ok_or_else(|| {
        ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "no knowledge base loaded")
    })?;
    let request: CreateRequest = if body.iter().all(u8::is_ascii_whitespace) {
        CreateRequest {
            known: BTreeMap::new(),
        }
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::unprocessable(e.to_string()))?
    };
    let mut session = Session::new(kb);
    for (variable, value) in &request.known {
        apply_answer(&mut session, variable, value)?;
    }
    let id = uuid::Uuid::new_v4().simple().to_string();
    let snap = snapshot(&id, &session);
    state.sessions.lock().unwrap().insert(
        id,
        Arc::new(Mutex::new(Entry {
            session,
            last_access: Instant::now(),
        })),
    );
    Ok((StatusCode::CREATED, Json(snap)))
}

async fn get_session(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<Snapshot>, ApiError> {
    let entry = state.lookup(&id)?;
    let mut entry = entry.lock().unwrap();
    entry.last_access = Instant::now();
    Ok(Json(snapshot(&id, &entry.session)))
}

async fn post_answer(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Snapshot>, ApiError> {
    let entry = state.lookup(&id)?;
    let request: AnswerRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::unprocessable(e.to_string()))?;
    let mut entry = entry.lock().unwrap();
    entry.last_access = Instant::now();
    apply_answer(&mut entry.session, &request.variable, &request.value)?;
    Ok(Json(snapshot(&id, &entry.session)))
}

async fn get_justification(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<JustificationQuery>,
) -> Result<Json<Value>, ApiError> {
    let entry = state.lookup(&id)?;
    let mut entry = entry.lock().unwrap();
    entry.last_access = Instant::now();
    let s = &entry.session;
    let kb = s.kb();
    let name = query
        .goal
        .ok_or_else(|| ApiError::unprocessable("missing ?goal= parameter"))?;
    let g = kb
        .goal_index(&name)
        .ok_or_else(|| ApiError::unprocessable(format!("unknown goal {name:?}")))?;
    let rule = s
        .justify(g)
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    let literals: Vec<Value> = rule
        .literals
        .iter()
        .map(|l| {
            let value = TruthValue::from_bool(l.value).as_str();
            json!({ kb.input_name(l.variable): value })
        })
        .collect();
    Ok(Json(json!({
        "goal": name,
        "because": kb.goal_name(rule.dominator),
        "literals": literals,
        "rule": rule.display(kb).to_string(),
    })))
}

pub fn router(state: Arc<AppState>) -> Router {
    let cors = state.config.cors_origin.as_deref().and_then(|origin| {
        origin.parse::<HeaderValue>().ok().map(|origin| {
            CorsLayer::new()
                .allow_origin(origin)
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([axum::http::header::CONTENT_TYPE])
        })
    });
    let router = Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/answers", post(post_answer))
        .route("/sessions/{id}/justification", get(get_justification))
        .with_state(state);
    match cors {
        Some(layer) => router.layer(layer),
        None => router,
    }
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    serve_on(tokio::net::TcpListener::bind(addr).await?, state).await
}

/// Serves on an already bound listener until ctrl-c.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
