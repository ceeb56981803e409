//! Read-only HTTP/JSON service over an analysis snapshot.
//!
//! A [`SnapshotStore`] holds the [`QueryIndex`] being served; [`router`]
//! exposes it under `/api/v1/` and [`serve`] runs the server, reloading the
//! snapshot directory on `SIGHUP`.

pub mod api;
mod index;
mod routes;
mod store;

use std::path::PathBuf;
use std::sync::Arc;

pub use index::QueryIndex;
pub use routes::{router, ApiError, DEFAULT_LIMIT};
pub use store::SnapshotStore;

/// Serves until interrupted.
pub async fn serve(
    listener: tokio::net::TcpListener,
    store: Arc<SnapshotStore>,
    ui_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    spawn_reload_on_hangup(store.clone());
    let app = router(store, ui_dir.as_deref());
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

#[cfg(unix)]
fn spawn_reload_on_hangup(store: Arc<SnapshotStore>) {
    use tokio::signal::unix::{signal, SignalKind};
    let mut hup = match signal(SignalKind::hangup()) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("cannot listen for SIGHUP, reload disabled: {e}");
            return;
        }
    };
    tokio::spawn(async move {
        while hup.recv().await.is_some() {
            if let Err(e) = store.reload() {
                log::error!("snapshot reload failed, keeping the current one: {e}");
            }
        }
    });
}

#[cfg(not(unix))]
fn spawn_reload_on_hangup(_store: Arc<SnapshotStore>) {}
