//! Session-based JSON API over the drx-core projection engine.

pub mod api;
pub mod error;
pub mod session;

pub use api::router;
pub use error::{ApiError, ApiResult};
pub use session::{fit_model, AppState, Session};
