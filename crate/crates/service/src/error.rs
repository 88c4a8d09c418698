use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use drx_core::Error;
use serde::Serialize;
use serde_json::{json, Value};

/// Error body: `{code, message, details}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
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

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn unprocessable(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("unknown {what} '{id}'"))
            .with_details(json!({ "kind": what, "id": id }))
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    /// Treats constraint errors as a conflict with the stored constraint
    /// set rather than a malformed request.
    pub fn constraint_conflict(err: Error) -> Self {
        match err {
            Error::Infeasible { feature, reason } | Error::InvalidConstraint { feature, reason } => {
                Self::new(StatusCode::CONFLICT, "infeasible_constraints", format!("feature {feature}: {reason}"))
                    .with_details(json!({ "feature": feature }))
            }
            other => other.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(err: Error) -> Self {
        let message = err.to_string();
        let (status, code, details) = match &err {
            Error::EmptyInput | Error::Csv(_) | Error::InvalidDataset(_) => (StatusCode::BAD_REQUEST, "invalid_csv", Value::Null),
            Error::RaggedRow { row, expected, found } => (
                StatusCode::BAD_REQUEST,
                "invalid_csv",
                json!({ "row": row, "expected": expected, "found": found }),
            ),
            Error::NonNumeric { row, column, value } => (
                StatusCode::BAD_REQUEST,
                "invalid_csv",
                json!({ "row": row, "column": column, "value": value }),
            ),
            Error::DuplicateId(id) => (StatusCode::BAD_REQUEST, "invalid_csv", json!({ "id": id })),
            Error::MissingIdColumn(c) => (StatusCode::BAD_REQUEST, "invalid_csv", json!({ "column": c })),
            Error::DegenerateFit(_) => (StatusCode::UNPROCESSABLE_ENTITY, "degenerate_fit", Value::Null),
            Error::TrainingDiverged { epoch } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "training_diverged", json!({ "epoch": epoch }))
            }
            Error::InvalidConfig(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_config", Value::Null),
            Error::DimensionMismatch { expected, found } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                "dimension_mismatch",
                json!({ "expected": expected, "found": found }),
            ),
            Error::InvalidConstraint { feature, .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, "invalid_constraint", json!({ "feature": feature }))
            }
            Error::Infeasible { feature, .. } => {
                (StatusCode::CONFLICT, "infeasible_constraints", json!({ "feature": feature }))
            }
            Error::UnknownFeature(f) => (StatusCode::UNPROCESSABLE_ENTITY, "unknown_feature", json!({ "feature": f })),
            Error::UnknownPoint(p) => (StatusCode::NOT_FOUND, "not_found", json!({ "kind": "point", "id": p })),
            Error::NotOrthonormal(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", Value::Null),
        };
        ApiError {
            status,
            code,
            message,
            details,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({}): {}", self.status, self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

pub type ApiResult<T> = Result<T, ApiError>;
