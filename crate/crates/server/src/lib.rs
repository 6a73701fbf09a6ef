//! HTTP/JSON API over one loaded classilist dataset.

pub mod docs;
pub mod error;
pub mod query;
pub mod routes;
pub mod state;

pub use error::ApiError;
pub use routes::router;
pub use state::{AppState, Snapshot};
