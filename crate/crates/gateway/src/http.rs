use std::collections::VecDeque;
use std::convert::Infallible;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dlite::{NodeError, NodeKind, Rejection};
use futures::stream::{self, Stream, StreamExt};
use salt::{Message, MessageKind};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::sync::broadcast::error::RecvError;

use crate::events::EventRecord;
use crate::registry::Registry;

type Shared = Arc<Registry>;

pub fn router(registry: Shared) -> Router {
    Router::new()
        .route("/nodes", get(list_nodes).post(create_node))
        .route("/nodes/{id}", get(describe).put(program).delete(clear))
        .route("/nodes/{id}/state", get(node_state))
        .route("/nodes/{id}/messages", post(post_message))
        .route("/nodes/{id}/sensors/{word}", post(inject))
        .route("/events", get(events))
        .route("/clock", get(clock).put(set_clock))
        .route("/clock/advance", post(advance))
        .with_state(registry)
}

/// An error response: status plus `{"error": code, "message": text, ...}`.
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn bad_request(message: impl ToString) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({"error": "bad_request", "message": message.to_string()}),
        }
    }
}

impl From<NodeError> for ApiError {
    fn from(e: NodeError) -> Self {
        let message = e.to_string();
        let (status, code, extra) = match &e {
            NodeError::UnknownNode(_) => (StatusCode::NOT_FOUND, "unknown_node", Value::Null),
            NodeError::DuplicateNode(_) => (StatusCode::CONFLICT, "duplicate_node", Value::Null),
            NodeError::NoBehaviour => (StatusCode::CONFLICT, "no_behaviour", Value::Null),
            NodeError::Faulted(_) | NodeError::Vm(_) => (StatusCode::CONFLICT, "faulted", Value::Null),
            NodeError::UnsupportedSensingWord(_) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                "unsupported_sensing_word",
                Value::Null,
            ),
            NodeError::Rejected(Rejection::Parse(p)) => (
                StatusCode::BAD_REQUEST,
                "parse",
                json!({"line": p.line, "column": p.column}),
            ),
            NodeError::Rejected(Rejection::Validation(issues)) => {
                (StatusCode::BAD_REQUEST, "validation", json!({"issues": issues}))
            }
            NodeError::Rejected(_) => (StatusCode::BAD_REQUEST, "rejected", Value::Null),
            NodeError::InvalidId(_)
            | NodeError::UnknownFeature(_)
            | NodeError::NotExternal
            | NodeError::SensingArity { .. }
            | NodeError::InvalidMessage(_) => (StatusCode::BAD_REQUEST, "bad_request", Value::Null),
        };
        let mut body = json!({"error": code, "message": message});
        if let Value::Object(extra) = extra {
            body.as_object_mut().expect("object").extend(extra);
        }
        ApiError { status, body }
    }
}

impl From<salt::MessageError> for ApiError {
    fn from(e: salt::MessageError) -> Self {
        ApiError::bad_request(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// JSON body; an empty body reads as `{}`.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    let bytes: &[u8] = if bytes.iter().all(u8::is_ascii_whitespace) {
        b"{}"
    } else {
        bytes
    };
    serde_json::from_slice(bytes).map_err(ApiError::bad_request)
}

#[derive(Deserialize)]
struct CreateBody {
    kind: String,
    id: Option<String>,
}

#[derive(Deserialize)]
struct ProgramBody {
    program: String,
    #[serde(default)]
    subscribers: Vec<String>,
}

#[derive(Deserialize)]
struct MessageBody {
    word: String,
    #[serde(default)]
    args: Vec<String>,
}

#[derive(Deserialize)]
struct SensorBody {
    #[serde(default)]
    args: Vec<String>,
}

async fn list_nodes(State(r): State<Shared>) -> Json<Value> {
    Json(json!(r.list()))
}

async fn create_node(State(r): State<Shared>, bytes: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let b: CreateBody = body(&bytes)?;
    let kind: NodeKind = b.kind.parse().map_err(ApiError::bad_request)?;
    let created = r.create(kind, b.id)?;
    Ok((StatusCode::CREATED, Json(json!(created))))
}

async fn describe(State(r): State<Shared>, Path(id): Path<String>) -> ApiResult<Value> {
    Ok(Json(json!(r.describe(&id)?)))
}

async fn node_state(State(r): State<Shared>, Path(id): Path<String>) -> ApiResult<Value> {
    Ok(Json(json!(r.status(&id)?)))
}

async fn program(State(r): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Value> {
    let b: ProgramBody = body(&bytes)?;
    Ok(Json(json!(r.put(&id, &b.program, b.subscribers)?)))
}

async fn clear(State(r): State<Shared>, Path(id): Path<String>) -> ApiResult<Value> {
    Ok(Json(json!(r.delete(&id)?)))
}

async fn post_message(State(r): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Value> {
    let b: MessageBody = body(&bytes)?;
    let message = Message::new(MessageKind::External, b.word, b.args)?;
    Ok(Json(json!(r.post(&id, &message)?)))
}

async fn inject(
    State(r): State<Shared>,
    Path((id, word)): Path<(String, String)>,
    bytes: Bytes,
) -> ApiResult<Value> {
    let b: SensorBody = body(&bytes)?;
    Ok(Json(json!(r.sense(&id, &word, b.args)?)))
}

#[derive(Deserialize)]
struct ClockBody {
    running: bool,
}

#[derive(Deserialize)]
struct AdvanceBody {
    #[serde(default = "one")]
    ticks: u64,
}

fn one() -> u64 {
    1
}

async fn clock(State(r): State<Shared>) -> Json<Value> {
    Json(json!(r.clock()))
}

async fn set_clock(State(r): State<Shared>, bytes: Bytes) -> ApiResult<Value> {
    let b: ClockBody = body(&bytes)?;
    r.set_running(b.running);
    Ok(Json(json!(r.clock())))
}

async fn advance(State(r): State<Shared>, bytes: Bytes) -> ApiResult<Value> {
    let b: AdvanceBody = body(&bytes)?;
    Ok(Json(json!(r.tick(b.ticks))))
}

#[derive(Deserialize, Serialize)]
struct EventsQuery {
    since: Option<u64>,
}

/// Server-sent events, one JSON record per event, with the sequence
/// number as the event id. Replays buffered records after `since` (or the
/// `Last-Event-ID` header), then follows live.
async fn events(
    State(r): State<Shared>,
    Query(q): Query<EventsQuery>,
    headers: HeaderMap,
) -> Sse<impl Stream<Item = Result<Event, Infallible>>> {
    let last_id = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.parse::<u64>().ok());
    let since = q.since.into_iter().chain(last_id).max().unwrap_or(0);
    let stream = record_stream(r, since).map(|rec| {
        let data = serde_json::to_string(&rec).expect("records serialize");
        Ok(Event::default().id(rec.seq.to_string()).data(data))
    });
    Sse::new(stream).keep_alive(KeepAlive::default())
}

struct Tail {
    registry: Shared,
    rx: tokio::sync::broadcast::Receiver<EventRecord>,
    pending: VecDeque<EventRecord>,
    last: u64,
    shutdown: tokio::sync::watch::Receiver<bool>,
}

/// Buffered records after `since`, then live records, each exactly once
/// and in sequence order. Ends when the registry shuts down.
pub fn record_stream(registry: Shared, since: u64) -> impl Stream<Item = EventRecord> {
    let (rx, snapshot) = registry.events().subscribe(since);
    let shutdown = registry.shutdown_signal();
    let tail = Tail {
        registry,
        rx,
        pending: snapshot.into(),
        last: since,
        shutdown,
    };
    stream::unfold(tail, |mut t| async move {
        loop {
            if let Some(rec) = t.pending.pop_front() {
                if rec.seq > t.last {
                    t.last = rec.seq;
                    return Some((rec, t));
                }
                continue;
            }
            if *t.shutdown.borrow() {
                return None;
            }
            tokio::select! {
                received = t.rx.recv() => match received {
                    Ok(rec) => t.pending.push_back(rec),
                    Err(RecvError::Lagged(_)) => t.pending.extend(t.registry.events().since(t.last)),
                    Err(RecvError::Closed) => return None,
                },
                _ = t.shutdown.changed() => {}
            }
        }
    })
}
