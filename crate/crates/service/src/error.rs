use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use relim_core::engine::EngineError;
use relim_core::problem::ParseError;
use relim_core::ProblemError;
use serde_json::json;
use thiserror::Error;

use crate::session::SessionError;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    MapNotTotal(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Cap(_) => StatusCode::CONFLICT,
            ApiError::MapNotTotal(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "invalid_input",
            ApiError::NotFound(_) => "not_found",
            ApiError::Cap(_) => "engine_cap",
            ApiError::MapNotTotal(_) => "map_not_total",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(msg) = &self {
            tracing::error!(%msg, "internal error");
        }
        let body = json!({ "error": { "code": self.code(), "message": self.to_string() } });
        (self.status(), Json(body)).into_response()
    }
}

impl From<ProblemError> for ApiError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::MapNotTotal(_) => ApiError::MapNotTotal(e.to_string()),
            ProblemError::AlphabetCap { .. } => ApiError::Cap(e.to_string()),
            _ => ApiError::BadRequest(e.to_string()),
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Problem(p) => p.into(),
            EngineError::AlphabetCap { .. } | EngineError::BudgetExceeded(_) | EngineError::ExhaustiveLimit { .. } => {
                ApiError::Cap(e.to_string())
            }
            EngineError::Cancelled => ApiError::Cap(e.to_string()),
            EngineError::Script(_) => ApiError::BadRequest(e.to_string()),
        }
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Problem(p) => p.into(),
            other => ApiError::BadRequest(other.to_string()),
        }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::UnknownNode(_) | SessionError::UnknownSession(_) => ApiError::NotFound(e.to_string()),
            SessionError::Engine(err) => err.into(),
            SessionError::Problem(err) => err.into(),
            SessionError::Io(_) | SessionError::Replay(_) => ApiError::Internal(e.to_string()),
        }
    }
}
