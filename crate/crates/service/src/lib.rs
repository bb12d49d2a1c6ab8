//! HTTP service for the round-elimination workbench.
//!
//! Sessions hold a tree of problems rooted at a user-supplied problem and
//! grown by speedup and merge operations. Every session is persisted as a
//! JSON-lines event log that is replayed (and hash-checked) on load.

pub mod config;
pub mod error;
pub mod jobs;
mod openapi;
pub mod routes;
pub mod session;

use std::sync::Arc;

pub use config::Config;
pub use error::ApiError;
pub use routes::{AppState, ParsedProblem};

/// Builds the router over a fresh state rooted at `config.data_dir`.
pub fn app(config: Config) -> Result<axum::Router, session::SessionError> {
    Ok(routes::router(Arc::new(AppState::new(config)?)))
}
