//! HTTP backend for the interactive seed loop: slices of the loaded volume,
//! segmentation runs, and contours of stored results.
//!
//! Results live only for the lifetime of the process.

mod error;
mod handlers;
mod state;

use std::net::SocketAddr;

use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::{Any, CorsLayer};

pub use error::ApiError;
pub use state::{AppState, Session, StoredResult};

pub fn router(state: AppState) -> Router {
    let cors = CorsLayer::new().allow_origin(Any).allow_methods(Any).allow_headers(Any);
    Router::new()
        .route("/api/volume", get(handlers::volume_info))
        .route("/api/slice/{axis}/{index}", get(handlers::slice_png))
        .route("/api/segment", post(handlers::segment))
        .route("/api/result/{id}/contour/{axis}/{index}", get(handlers::contour))
        .layer(cors)
        .with_state(state)
}

pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

/// Serves on `0.0.0.0:port` from a fresh multi-threaded runtime until the
/// process is stopped.
pub fn serve_blocking(state: AppState, port: u16) -> std::io::Result<()> {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(serve(state, SocketAddr::from(([0, 0, 0, 0], port))))
}
