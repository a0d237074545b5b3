use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use discourse_core::lacan::AmbiguityReport;
use discourse_core::{HeadlineId, LacanCode};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::SessionError;
use crate::session::{NextHeadline, SessionState};
use crate::store::SessionStore;

type Shared = State<Arc<SessionStore>>;
type ApiResult<T> = Result<Json<T>, ApiError>;

/// HTTP/JSON surface of a [`SessionStore`].
pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create).get(list))
        .route("/sessions/{id}", get(state))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/headlines", get(headlines))
        .route("/sessions/{id}/assign", post(assign))
        .route("/sessions/{id}/reveal", post(reveal))
        .route("/sessions/{id}/reassign", post(reassign))
        .route("/sessions/{id}/extend", post(extend))
        .route("/sessions/{id}/close", post(close))
        .route("/sessions/{id}/ambiguities", get(ambiguities))
        .route("/sessions/{id}/export", get(export))
        .with_state(store)
}

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        use SessionError::*;
        let (status, kind) = match &self.0 {
            UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            EmptySession => (StatusCode::BAD_REQUEST, "empty_session"),
            UnknownHeadline(_) => (StatusCode::BAD_REQUEST, "unknown_headline_id"),
            DuplicateHeadline(_) => (StatusCode::BAD_REQUEST, "duplicate_headline_id"),
            BadBatchSize { .. } => (StatusCode::BAD_REQUEST, "bad_batch_size"),
            EmptyJustification => (StatusCode::BAD_REQUEST, "empty_justification"),
            NotAssigned(_) => (StatusCode::BAD_REQUEST, "not_assigned"),
            WrongPhase { .. } => (StatusCode::CONFLICT, "wrong_phase"),
            AlreadyAssigned(_) => (StatusCode::CONFLICT, "already_assigned"),
            IncompleteBatch(_) => (StatusCode::CONFLICT, "incomplete_batch"),
            Ambiguous(_) => (StatusCode::CONFLICT, "ambiguous_state"),
            Lacan(_) => (StatusCode::UNPROCESSABLE_ENTITY, "derivation_failed"),
            CorruptLog(_) | Io(_) | Json(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        let mut body = json!({ "error": kind, "message": self.0.to_string() });
        match &self.0 {
            Ambiguous(report) => body["ambiguities"] = json!(report),
            IncompleteBatch(missing) => body["unassigned"] = json!(missing),
            _ => {}
        }
        (status, axum::Json(body)).into_response()
    }
}

#[derive(Deserialize)]
struct CreateBody {
    headline_ids: Vec<HeadlineId>,
    batch_size: Option<usize>,
}

#[derive(Deserialize)]
struct AssignBody {
    headline_id: HeadlineId,
    code: LacanCode,
}

#[derive(Deserialize)]
struct ReassignBody {
    headline_id: HeadlineId,
    code: LacanCode,
    #[serde(default)]
    justification: String,
}

/// Either explicit ids or the next `count` reserved ones.
#[derive(Deserialize)]
struct ExtendBody {
    headline_ids: Option<Vec<HeadlineId>>,
    count: Option<usize>,
}

async fn create(State(store): Shared, Json(body): Json<CreateBody>) -> ApiResult<SessionState> {
    let batch = body.batch_size.unwrap_or(body.headline_ids.len());
    Ok(Json(store.create(&body.headline_ids, batch)?))
}

async fn list(State(store): Shared) -> Json<Vec<String>> {
    Json(store.session_ids())
}

async fn state(State(store): Shared, Path(id): Path<String>) -> ApiResult<SessionState> {
    Ok(Json(store.read(&id, |s, d| s.state(d))?))
}

async fn next(State(store): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(match store.read(&id, |s, d| s.next_unassigned(d))? {
        Some(h) => Json(h).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    })
}

async fn headlines(State(store): Shared, Path(id): Path<String>) -> ApiResult<Vec<NextHeadline>> {
    Ok(Json(store.read(&id, |s, d| {
        s.batch()
            .iter()
            .filter_map(|&h| d.get(h))
            .map(|r| NextHeadline {
                id: r.id(),
                text: r.headline.text().to_owned(),
                label: s.label_visibility().then(|| r.label()),
            })
            .collect()
    })?))
}

async fn assign(State(store): Shared, Path(id): Path<String>, Json(body): Json<AssignBody>) -> ApiResult<SessionState> {
    Ok(Json(store.write(&id, |s, d| {
        s.submit_code(body.headline_id, body.code, d)?;
        Ok(s.state(d))
    })?))
}

fn with_report(state: SessionState, report: &AmbiguityReport) -> Json<Value> {
    Json(json!({ "state": state, "ambiguities": report }))
}

async fn reveal(State(store): Shared, Path(id): Path<String>) -> ApiResult<Value> {
    Ok(store.write(&id, |s, d| {
        let report = s.reveal(d)?.clone();
        Ok(with_report(s.state(d), &report))
    })?)
}

async fn reassign(State(store): Shared, Path(id): Path<String>, Json(body): Json<ReassignBody>) -> ApiResult<Value> {
    Ok(store.write(&id, |s, d| {
        let report = s.reassign(body.headline_id, body.code, &body.justification, d)?.clone();
        Ok(with_report(s.state(d), &report))
    })?)
}

async fn extend(State(store): Shared, Path(id): Path<String>, Json(body): Json<ExtendBody>) -> ApiResult<SessionState> {
    Ok(Json(store.write(&id, |s, d| {
        match (&body.headline_ids, body.count) {
            (Some(ids), _) => s.extend(ids, d)?,
            (None, Some(n)) => s.extend_reserved(n, d)?,
            (None, None) => s.extend_reserved(s.reserved().len(), d)?,
        }
        Ok(s.state(d))
    })?))
}

async fn close(State(store): Shared, Path(id): Path<String>) -> ApiResult<SessionState> {
    Ok(Json(store.write(&id, |s, d| {
        s.close(d)?;
        Ok(s.state(d))
    })?))
}

async fn ambiguities(State(store): Shared, Path(id): Path<String>) -> ApiResult<AmbiguityReport> {
    let report = store.read(&id, |s, _| {
        if s.label_visibility() {
            Ok(s.ambiguities().clone())
        } else {
            Err(SessionError::WrongPhase {
                phase: s.phase(),
                operation: "ambiguities",
            })
        }
    })??;
    Ok(Json(report))
}

async fn export(State(store): Shared, Path(id): Path<String>) -> ApiResult<Value> {
    let e = store.export(&id)?;
    Ok(Json(json!({ "partition": e.partition, "classifier": e.classifier })))
}
