use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use nlq_cli::server::{router, AppState, DEFAULT_SESSION_TTL};
use nlq_core::dialogue::{AssetPaths, Assets};
use serde_json::{json, Value};
use tower::ServiceExt;

fn state(ttl: Duration) -> Arc<AppState> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let Assets { engine, db } = Assets::load(&AssetPaths::bundled(&root, "hotel")).unwrap();
    Arc::new(AppState::new(engine, db, ttl))
}

fn app() -> Router {
    router(state(DEFAULT_SESSION_TTL), None)
}

async fn send(app: &Router, method: &str, uri: &str, body: &str) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn turn(app: &Router, session: &str, text: &str) -> (StatusCode, Value) {
    send(app, "POST", "/api/turn", &json!({ "session_id": session, "text": text }).to_string()).await
}

#[tokio::test]
async fn health() {
    let (status, body) = send(&app(), "GET", "/api/health", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "status": "ok" }));
}

#[tokio::test]
async fn table_one_question_then_follow_up() {
    let app = app();
    let (status, body) = turn(&app, "a", "How many rooms are available?").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["answer"], "THERE ARE 3 ROOMS AVAILABLE");
    assert_eq!(body["sql"], "SELECT COUNT(id) FROM rooms WHERE status = 'available'");
    assert_eq!(body["target"], "database");
    assert_eq!(body["template_id"], "T1");
    assert!(body["error"].is_null());

    let (status, body) = turn(&app, "a", "of those, which are on floor 2").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["target"], "previous_result");
    assert_eq!(body["rows"].as_array().unwrap().len(), 1);
    assert_eq!(body["columns"][0], "id");
}

#[tokio::test]
async fn bad_requests_are_400() {
    let app = app();
    for body in ["{not json", "{}", r#"{"session_id":"a","text":""}"#, r#"{"session_id":"","text":"hi"}"#, ""] {
        let (status, resp) = send(&app, "POST", "/api/turn", body).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(resp["error"]["stage"], "request");
    }
}

#[tokio::test]
async fn pipeline_errors_are_422_with_the_stage() {
    let (status, body) = turn(&app(), "a", "flurble womp").await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(body["error"]["stage"], "template_matching");
    assert!(body["answer"].is_null() && body["rows"].is_null());
}

#[tokio::test]
async fn schema_lists_the_tables() {
    let (status, body) = send(&app(), "GET", "/api/schema", "").await;
    assert_eq!(status, StatusCode::OK);
    let names: Vec<&str> = body["tables"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["rooms", "reservations"]);
}

#[tokio::test]
async fn reset_forgets_the_previous_answer() {
    let app = app();
    turn(&app, "a", "How many rooms are available?").await;
    let (status, body) = send(&app, "POST", "/api/session/reset", r#"{"session_id":"a"}"#).await;
    assert_eq!((status, body), (StatusCode::OK, json!({ "status": "ok" })));
    let (_, body) = turn(&app, "a", "of those, which are on floor 2").await;
    assert_eq!(body["target"], "database");
    assert_eq!(body["warnings"].as_array().unwrap().len(), 1);
    let (status, _) = send(&app, "POST", "/api/session/reset", "{}").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn sessions_do_not_share_context() {
    let app = app();
    turn(&app, "a", "How many rooms are available?").await;
    turn(&app, "b", "Show rooms on floor 4").await;
    let (_, a) = turn(&app, "a", "of those, which are on floor 2").await;
    let (_, b) = turn(&app, "b", "of those, which are on floor 2").await;
    assert_eq!(a["target"], "previous_result");
    assert_eq!(a["rows"].as_array().unwrap().len(), 1);
    assert_eq!(b["target"], "previous_result");
    assert_eq!(b["rows"].as_array().unwrap().len(), 0);
    assert_eq!(b["answer"], "NO RESULTS");
}

#[tokio::test]
async fn same_requests_same_responses() {
    let script = ["How many rooms are available?", "of those, which are on floor 2", "Delete the reservations of Tom Walsh", "Show all reservations"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let app = app();
        let mut out = Vec::new();
        for q in script {
            let (_, body) = turn(&app, "s", q).await;
            out.push((body["sql"].clone(), body["answer"].clone(), body["rows"].clone()));
        }
        runs.push(out);
    }
    assert_eq!(runs[0], runs[1]);
}

#[tokio::test]
async fn idle_sessions_expire() {
    let state = state(Duration::ZERO);
    state.turn("old", "How many rooms are available?").unwrap();
    state.turn("new", "Show all rooms").unwrap();
    assert_eq!(state.session_count(), 1);
}

#[tokio::test]
async fn static_files_are_served_when_configured() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<p>hello</p>").unwrap();
    let app = router(state(DEFAULT_SESSION_TTL), Some(dir.path().to_path_buf()));
    let req = Request::builder().uri("/index.html").body(Body::empty()).unwrap();
    let resp = app.oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(&bytes[..], b"<p>hello</p>");
}
