use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use imagelab_core::engine::{load_template, save_template, Pipeline};
use imagelab_core::raster::{decode_png, PNG_SIGNATURE};
use imagelab_core::Image;
use serde_json::{json, Value};
use tokio::sync::{Mutex, OwnedMutexGuard};

use crate::error::ApiError;
use crate::preview::{self, Payload};
use crate::session::Session;
use crate::templates::{valid_name, SaveError};
use crate::AppState;

type ApiResult<T> = Result<T, ApiError>;
type Shared = State<Arc<AppState>>;

pub fn routes(state: Arc<AppState>) -> Router {
    let limit = state.config.max_body_bytes;
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(session_info))
        .route("/api/sessions/{id}/pipeline", get(get_pipeline).put(put_pipeline))
        .route("/api/sessions/{id}/source", post(upload_source))
        .route("/api/sessions/{id}/execute", post(execute))
        .route("/api/sessions/{id}/previews/{stage}", get(get_preview))
        .route("/api/sessions/{id}/undo", post(undo))
        .route("/api/sessions/{id}/redo", post(redo))
        .route("/api/sessions/{id}/history", get(history))
        .route("/api/catalog", get(catalog))
        .route("/api/templates", get(list_templates).post(create_template))
        .route("/api/templates/{name}", get(get_template))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "NOT_FOUND", "no such endpoint") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(StatusCode::METHOD_NOT_ALLOWED, "METHOD_NOT_ALLOWED", "method not allowed")
        })
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

async fn lock(state: &AppState, id: &str) -> ApiResult<OwnedMutexGuard<Session>> {
    let session: Arc<Mutex<Session>> = state
        .sessions
        .get(id)
        .ok_or_else(|| ApiError::session_not_found(id))?;
    Ok(session.lock_owned().await)
}

fn parse_json(body: &[u8]) -> ApiResult<Value> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::bad_request("MALFORMED_DOCUMENT", format!("invalid JSON: {e}")))
}

fn pipeline_doc(p: &Pipeline) -> Json<Value> {
    Json(serde_json::to_value(p).expect("pipeline serializes"))
}

async fn create_session(State(state): Shared) -> ApiResult<impl IntoResponse> {
    let id = state
        .sessions
        .create(Arc::clone(&state.catalog))
        .ok_or_else(|| {
            ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "SERVICE_BUSY", "session capacity reached")
        })?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}

fn source_meta(img: &Image) -> Value {
    json!({"width": img.width(), "height": img.height(), "format": img.format()})
}

async fn session_info(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = lock(&state, &id).await?;
    let h = &s.history;
    Ok(Json(json!({
        "id": id,
        "pipeline": h.current().pipeline(),
        "source": s.source.as_deref().map(source_meta),
        "undo_depth": h.undo_depth(),
        "redo_depth": h.redo_depth(),
        "can_undo": h.can_undo(),
        "can_redo": h.can_redo(),
        "stages_computed": h.current().outputs().len(),
    })))
}

async fn get_pipeline(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = lock(&state, &id).await?;
    Ok(pipeline_doc(s.history.current().pipeline()))
}

async fn put_pipeline(
    State(state): Shared,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let mut s = lock(&state, &id).await?;
    let pipeline = Pipeline::from_value(parse_json(&body)?)?;
    s.history.replace_pipeline(pipeline)?;
    Ok(pipeline_doc(s.history.current().pipeline()))
}

/// Width and height from the IHDR chunk, read before decoding so oversized
/// images are refused without allocating for them.
fn png_dimensions(bytes: &[u8]) -> Option<(usize, usize)> {
    if bytes.len() < 24 || bytes[..8] != PNG_SIGNATURE || &bytes[12..16] != b"IHDR" {
        return None;
    }
    let be = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
    Some((be(16), be(20)))
}

async fn upload_source(
    State(state): Shared,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let mut s = lock(&state, &id).await?;
    let max = state.config.max_dimension;
    let too_large = |w: usize, h: usize| {
        ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "IMAGE_TOO_LARGE",
            format!("{w}x{h} exceeds the {max}x{max} limit"),
        )
    };
    if let Some((w, h)) = png_dimensions(&body) {
        if w > max || h > max {
            return Err(too_large(w, h));
        }
    }
    let img = tokio::task::spawn_blocking(move || decode_png(&body))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))?
        .map_err(|e| ApiError::bad_request("DECODE_ERROR", e.to_string()))?;
    if img.width() > max || img.height() > max {
        return Err(too_large(img.width(), img.height()));
    }
    let meta = source_meta(&img);
    s.source = Some(Arc::new(img));
    s.history.clear_outputs();
    Ok(Json(meta))
}

async fn execute(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let mut s = lock(&state, &id).await?;
    let source = s
        .source
        .clone()
        .ok_or_else(|| ApiError::precondition("no source image uploaded"))?;
    if s.history.current().pipeline().is_empty() {
        return Err(ApiError::precondition("pipeline is empty"));
    }
    let body = tokio::task::spawn_blocking(move || {
        let current = s.history.current_mut();
        let from = current.first_stale();
        current.execute(&source, from);
        json!({
            "recomputed_from": from,
            "complete": current.error().is_none(),
            "stages": preview::all(current),
        })
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "INTERNAL", e.to_string()))?;
    Ok(Json(body))
}

async fn get_preview(
    State(state): Shared,
    Path((id, stage)): Path<(String, String)>,
) -> ApiResult<Response> {
    let stage: usize = stage
        .parse()
        .map_err(|_| ApiError::bad_request("BAD_STAGE", format!("invalid stage index {stage:?}")))?;
    let s = lock(&state, &id).await?;
    let current = s.history.current();
    match preview::payload(current, stage) {
        Some(Payload::Png(bytes)) => Ok(([(header::CONTENT_TYPE, "image/png")], bytes).into_response()),
        Some(Payload::Json(v)) => Ok(Json(v).into_response()),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "STAGE_NOT_AVAILABLE",
            format!("stage {stage} has not been computed"),
        )
        .with_details(json!({
            "stages": current.pipeline().len(),
            "computed": current.outputs().len(),
        }))),
    }
}

async fn undo(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let mut s = lock(&state, &id).await?;
    s.history.undo()?;
    Ok(pipeline_doc(s.history.current().pipeline()))
}

async fn redo(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let mut s = lock(&state, &id).await?;
    s.history.redo()?;
    Ok(pipeline_doc(s.history.current().pipeline()))
}

async fn history(State(state): Shared, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = lock(&state, &id).await?;
    Ok(Json(serde_json::to_value(s.history.export_history()).expect("serializes")))
}

async fn catalog(State(state): Shared) -> Json<Value> {
    Json(state.catalog.document())
}

fn io_error(e: std::io::Error) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "STORAGE_ERROR", e.to_string())
}

fn check_name(name: &str) -> ApiResult<()> {
    if valid_name(name) {
        Ok(())
    } else {
        Err(ApiError::bad_request(
            "INVALID_NAME",
            "template names must match [A-Za-z0-9_-]{1,64}",
        ))
    }
}

async fn list_templates(State(state): Shared) -> ApiResult<Json<Value>> {
    let names = state.templates.list().map_err(io_error)?;
    Ok(Json(json!({ "templates": names })))
}

/// Body: `{"name": ..., "session": <id>}` saves that session's current
/// pipeline; `{"name": ..., "pipeline": <document>}` saves the document.
async fn create_template(State(state): Shared, body: Bytes) -> ApiResult<impl IntoResponse> {
    let body = parse_json(&body)?;
    let name = body
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| ApiError::bad_request("MALFORMED_DOCUMENT", "missing \"name\""))?
        .to_owned();
    check_name(&name)?;
    let pipeline = match (body.get("session").and_then(Value::as_str), body.get("pipeline")) {
        (Some(id), None) => lock(&state, id).await?.history.current().pipeline().clone(),
        (None, Some(doc)) => {
            let p = Pipeline::from_value(doc.clone())?;
            imagelab_core::PipelineState::new(Arc::clone(&state.catalog), p.clone())?;
            p
        }
        _ => {
            return Err(ApiError::bad_request(
                "MALFORMED_DOCUMENT",
                "give exactly one of \"session\" and \"pipeline\"",
            ))
        }
    };
    let doc = save_template(&pipeline);
    match state.templates.save(&name, &doc) {
        Ok(()) => Ok((
            StatusCode::CREATED,
            Json(json!({ "name": name, "pipeline": pipeline })),
        )),
        Err(SaveError::Exists) => Err(ApiError::new(
            StatusCode::CONFLICT,
            "TEMPLATE_EXISTS",
            format!("template {name} already exists"),
        )),
        Err(SaveError::Io(e)) => Err(io_error(e)),
    }
}

async fn get_template(State(state): Shared, Path(name): Path<String>) -> ApiResult<Json<Value>> {
    check_name(&name)?;
    let text = state.templates.load(&name).map_err(io_error)?.ok_or_else(|| {
        ApiError::new(
            StatusCode::NOT_FOUND,
            "TEMPLATE_NOT_FOUND",
            format!("no template named {name}"),
        )
    })?;
    let pipeline = load_template(&state.catalog, &text)?;
    Ok(pipeline_doc(&pipeline))
}
