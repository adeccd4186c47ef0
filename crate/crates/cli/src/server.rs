use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use nlq_core::dialogue::{complete_read, complete_write, plan_turn, Database, DialogueContext, Engine, TurnError, TurnOutcome};
use nlq_core::engine::{SchemaCatalog, Value};

pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct ApiTurnRequest {
    pub session_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub stage: String,
    pub message: String,
}

/// Either `answer`, `rows` and friends are set, or `error` is.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiTurnResponse {
    pub sql: Option<String>,
    pub target: Option<String>,
    pub answer: Option<String>,
    pub columns: Option<Vec<String>>,
    pub rows: Option<Vec<Vec<Value>>>,
    pub template_id: Option<String>,
    pub warnings: Vec<String>,
    pub elapsed_ms: f64,
    pub error: Option<ApiError>,
}

impl ApiTurnResponse {
    fn from_outcome(o: TurnOutcome) -> Self {
        ApiTurnResponse {
            sql: Some(o.sql.to_string()),
            target: Some(o.target.to_string()),
            answer: Some(o.answer),
            columns: Some(o.result.columns),
            rows: Some(o.result.rows),
            template_id: Some(o.template_id),
            warnings: o.trace.into_iter().filter_map(|r| r.warning).collect(),
            elapsed_ms: o.elapsed_ms,
            error: None,
        }
    }

    fn from_error(e: TurnError) -> Self {
        ApiTurnResponse {
            sql: None,
            target: None,
            answer: None,
            columns: None,
            rows: None,
            template_id: None,
            warnings: e.trace.iter().filter_map(|r| r.warning.clone()).collect(),
            elapsed_ms: e.elapsed_ms,
            error: Some(ApiError { stage: e.stage.to_string(), message: e.error.to_string() }),
        }
    }
}

struct Session {
    ctx: DialogueContext,
    last_seen: Instant,
}

/// Shared server state. Reads of the database run concurrently; a turn
/// that changes rows takes the write lock. Each session's turns are
/// serialized by the session's own lock.
pub struct AppState {
    engine: Engine,
    db: RwLock<Database>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    ttl: Duration,
}

impl AppState {
    pub fn new(engine: Engine, db: Database, ttl: Duration) -> Self {
        AppState { engine, db: RwLock::new(db), sessions: Mutex::new(HashMap::new()), ttl }
    }

    fn session(&self, id: &str) -> Arc<Mutex<Session>> {
        let mut sessions = self.sessions.lock().expect("session map poisoned");
        let now = Instant::now();
        sessions.retain(|_, s| s.lock().map(|s| now.duration_since(s.last_seen) < self.ttl).unwrap_or(false));
        sessions
            .entry(id.to_string())
            .or_insert_with(|| Arc::new(Mutex::new(Session { ctx: DialogueContext::new(id), last_seen: now })))
            .clone()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map poisoned").len()
    }

    /// Runs one turn for a session.
    pub fn turn(&self, session_id: &str, text: &str) -> Result<TurnOutcome, TurnError> {
        let session = self.session(session_id);
        let mut s = session.lock().expect("session poisoned");
        s.last_seen = Instant::now();
        let plan = {
            let db = self.db.read().expect("database lock poisoned");
            plan_turn(&s.ctx, text, &self.engine, &db)?
        };
        if plan.needs_write() {
            let mut db = self.db.write().expect("database lock poisoned");
            complete_write(plan, &mut s.ctx, &mut db)
        } else {
            let db = self.db.read().expect("database lock poisoned");
            complete_read(plan, &mut s.ctx, &db)
        }
    }

    pub fn reset(&self, session_id: &str) {
        let session = self.session(session_id);
        let mut s = session.lock().expect("session poisoned");
        s.ctx.reset();
        s.last_seen = Instant::now();
    }

    pub fn catalog(&self) -> SchemaCatalog {
        self.db.read().expect("database lock poisoned").catalog().clone()
    }
}

fn bad_request(message: impl Into<String>) -> (StatusCode, Json<serde_json::Value>) {
    (StatusCode::BAD_REQUEST, Json(json!({ "error": { "stage": "request", "message": message.into() } })))
}

async fn turn(State(state): State<Arc<AppState>>, body: Bytes) -> (StatusCode, Json<serde_json::Value>) {
    let req: ApiTurnRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(format!("malformed request: {e}")),
    };
    if req.session_id.trim().is_empty() || req.text.trim().is_empty() {
        return bad_request("session_id and text must be non-empty");
    }
    let (status, resp) = match state.turn(&req.session_id, &req.text) {
        Ok(o) => (StatusCode::OK, ApiTurnResponse::from_outcome(o)),
        Err(e) => (StatusCode::UNPROCESSABLE_ENTITY, ApiTurnResponse::from_error(e)),
    };
    match serde_json::to_value(resp) {
        Ok(v) => (status, Json(v)),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({ "error": { "stage": "response", "message": e.to_string() } }))),
    }
}

#[derive(Deserialize)]
struct ResetRequest {
    session_id: String,
}

async fn reset(State(state): State<Arc<AppState>>, body: Bytes) -> (StatusCode, Json<serde_json::Value>) {
    match serde_json::from_slice::<ResetRequest>(&body) {
        Ok(r) if !r.session_id.trim().is_empty() => {
            state.reset(&r.session_id);
            (StatusCode::OK, Json(json!({ "status": "ok" })))
        }
        Ok(_) => bad_request("session_id must be non-empty"),
        Err(e) => bad_request(format!("malformed request: {e}")),
    }
}

async fn schema(State(state): State<Arc<AppState>>) -> Json<SchemaCatalog> {
    Json(state.catalog())
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn router(state: Arc<AppState>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/turn", post(turn))
        .route("/api/session/reset", post(reset))
        .route("/api/schema", get(schema))
        .route("/api/health", get(health))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}
