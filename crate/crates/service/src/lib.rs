//! HTTP service exposing imagelab sessions: upload a source image, edit a
//! rule-checked pipeline with undo/redo, execute it and fetch per-stage
//! previews, and keep named templates.

mod api;
mod error;
mod preview;
mod session;
mod templates;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::Router;
use imagelab_core::Catalog;
use tokio::net::TcpListener;

pub use error::ApiError;
pub use session::{Session, SessionStore};
pub use templates::{valid_name, TemplateStore};

#[derive(Debug, Clone)]
pub struct Config {
    pub listen: SocketAddr,
    pub template_dir: PathBuf,
    /// Largest accepted source width or height.
    pub max_dimension: usize,
    /// Idle time after which a session is reclaimed.
    pub session_ttl: Duration,
    pub max_sessions: usize,
    pub max_body_bytes: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8650)),
            template_dir: PathBuf::from("templates"),
            max_dimension: 4096,
            session_ttl: Duration::from_secs(3600),
            max_sessions: 1024,
            max_body_bytes: 64 << 20,
        }
    }
}

pub struct AppState {
    pub config: Config,
    pub catalog: Arc<Catalog>,
    pub sessions: SessionStore,
    pub templates: TemplateStore,
}

impl AppState {
    pub fn new(config: Config) -> Arc<Self> {
        Arc::new(Self {
            catalog: Catalog::standard(),
            sessions: SessionStore::new(config.session_ttl, config.max_sessions),
            templates: TemplateStore::new(config.template_dir.clone()),
            config,
        })
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    api::routes(state)
}

/// Serves on `listener` until the future is dropped, reaping idle sessions
/// in the background.
pub async fn serve(listener: TcpListener, config: Config) -> std::io::Result<()> {
    serve_with_shutdown(listener, config, std::future::pending()).await
}

pub async fn serve_with_shutdown(
    listener: TcpListener,
    config: Config,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let state = AppState::new(config);
    let reaper = {
        let state = Arc::clone(&state);
        let period = (state.config.session_ttl / 4).clamp(Duration::from_millis(10), Duration::from_secs(60));
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(period);
            loop {
                tick.tick().await;
                state.sessions.reap();
            }
        })
    };
    let result = axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await;
    reaper.abort();
    result
}
