use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use imagelab_core::EngineError;
use serde_json::{json, Value};

/// Structured error body `{code, message, details}`.
#[derive(Debug, Clone)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn session_not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "SESSION_NOT_FOUND", format!("no session {id}"))
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, "PRECONDITION_FAILED", message)
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::Violations(v) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "PIPELINE_REJECTED", message)
                    .with_details(json!({ "violations": v }))
            }
            EngineError::UnknownOperator { index, op } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "UNKNOWN_OPERATOR", message)
                    .with_details(json!({ "index": index, "op": op }))
            }
            EngineError::DuplicateBlockId(id) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "DUPLICATE_BLOCK_ID", message)
                    .with_details(json!({ "id": id }))
            }
            EngineError::Malformed(_) => Self::bad_request("MALFORMED_DOCUMENT", message),
            EngineError::SchemaVersion(_) => Self::bad_request("SCHEMA_VERSION", message),
            EngineError::EmptyStack(_) => Self::new(StatusCode::CONFLICT, "EMPTY_STACK", message),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "code": self.code,
            "message": self.message,
            "details": self.details,
        });
        (self.status, Json(body)).into_response()
    }
}
