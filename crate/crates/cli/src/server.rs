//! HTTP session service for interactive play.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::session::{status_name, NewGame, Session, SessionError};

#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<Mutex<BTreeMap<String, Arc<Mutex<Session>>>>>,
    next: Arc<Mutex<u64>>,
    log: Option<Arc<Mutex<File>>>,
}

impl AppState {
    /// State with an append-only session log.
    pub fn with_log(path: &Path) -> std::io::Result<AppState> {
        let f = File::options().create(true).append(true).open(path)?;
        Ok(AppState {
            log: Some(Arc::new(Mutex::new(f))),
            ..AppState::default()
        })
    }

    fn record(&self, event: Value) {
        if let Some(log) = &self.log {
            let mut f = log.lock().unwrap_or_else(|e| e.into_inner());
            // A failed log write must not take the session down.
            let _ = writeln!(f, "{event}");
        }
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).get(id).cloned()
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/game/new", post(new_game))
        .route("/api/game/{id}/move", post(make_move))
        .route("/api/game/{id}", get(get_game))
        .with_state(state)
}

fn error(code: StatusCode, msg: impl std::fmt::Display) -> Response {
    (code, Json(json!({ "error": msg.to_string() }))).into_response()
}

fn session_error(e: SessionError) -> Response {
    match e {
        SessionError::Config(m) => error(StatusCode::BAD_REQUEST, m),
        SessionError::Illegal(m) => error(StatusCode::UNPROCESSABLE_ENTITY, m),
    }
}

/// Runs engine work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, Response> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| error(StatusCode::INTERNAL_SERVER_ERROR, e))
}

async fn new_game(State(app): State<AppState>, body: Result<Json<NewGame>, axum::extract::rejection::JsonRejection>) -> Response {
    let Json(cfg) = match body {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.body_text()),
    };
    let id = {
        let mut n = app.next.lock().unwrap_or_else(|e| e.into_inner());
        *n += 1;
        format!("s{n}")
    };
    let made = blocking({
        let id = id.clone();
        move || -> Result<(Session, Value), SessionError> {
            let (s, engine_move) = Session::new(&id, cfg)?;
            let body = json!({
                "sessionId": s.id,
                "position": s.position,
                "engineMove": engine_move,
                "status": status_name(s.status()?),
                "legalMoves": s.legal_moves()?,
            });
            Ok((s, body))
        }
    })
    .await;
    match made {
        Err(r) => r,
        Ok(Err(e)) => session_error(e),
        Ok(Ok((s, body))) => {
            app.record(json!({
                "event": "new",
                "sessionId": s.id,
                "kind": s.kind,
                "humanRole": s.human,
                "params": s.params,
                "left": s.left,
                "right": s.right,
            }));
            app.sessions
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .insert(id, Arc::new(Mutex::new(s)));
            (StatusCode::CREATED, Json(body)).into_response()
        }
    }
}

#[derive(Deserialize)]
struct MoveBody {
    #[serde(rename = "move")]
    mv: Value,
}

async fn make_move(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<MoveBody>, axum::extract::rejection::JsonRejection>,
) -> Response {
    let Some(session) = app.session(&id) else {
        return error(StatusCode::NOT_FOUND, format!("no session {id}"));
    };
    let Json(MoveBody { mv }) = match body {
        Ok(b) => b,
        Err(e) => return error(StatusCode::UNPROCESSABLE_ENTITY, e.body_text()),
    };
    let logged = mv.clone();
    // Holding the session lock for the whole step serializes its moves.
    let played = blocking(move || -> Result<Value, SessionError> {
        let mut s = session.lock().unwrap_or_else(|e| e.into_inner());
        let engine_move = s.play(mv)?;
        Ok(json!({
            "position": s.position,
            "engineMove": engine_move,
            "status": status_name(s.status()?),
            "legalMoves": s.legal_moves()?,
        }))
    })
    .await;
    match played {
        Err(r) => r,
        Ok(Err(e)) => session_error(e),
        Ok(Ok(body)) => {
            app.record(json!({
                "event": "move",
                "sessionId": id,
                "move": logged,
                "engineMove": body["engineMove"],
            }));
            Json(body).into_response()
        }
    }
}

async fn get_game(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> Response {
    let Some(session) = app.session(&id) else {
        return error(StatusCode::NOT_FOUND, format!("no session {id}"));
    };
    let view = blocking(move || session.lock().unwrap_or_else(|e| e.into_inner()).view()).await;
    match view {
        Err(r) => r,
        Ok(Err(e)) => session_error(e),
        Ok(Ok(v)) => Json(v).into_response(),
    }
}

/// Binds `port` on localhost and serves until the process ends.
pub async fn serve(port: u16, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
