use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use coword_core::Result;

use crate::index::QueryIndex;

/// Holds the index currently being served. Readers take an `Arc` and keep
/// using it for the whole request, so a swap never mixes two snapshots.
pub struct SnapshotStore {
    current: RwLock<Arc<QueryIndex>>,
    dir: Option<PathBuf>,
}

impl SnapshotStore {
    pub fn new(index: QueryIndex) -> Self {
        SnapshotStore {
            current: RwLock::new(Arc::new(index)),
            dir: None,
        }
    }

    /// Loads and validates the snapshot in `dir`; [`reload`](Self::reload)
    /// reads the same directory again.
    pub fn open(dir: &Path) -> Result<Self> {
        let index = QueryIndex::load(dir)?;
        Ok(SnapshotStore {
            current: RwLock::new(Arc::new(index)),
            dir: Some(dir.to_owned()),
        })
    }

    pub fn current(&self) -> Arc<QueryIndex> {
        self.current
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .clone()
    }

    /// Replaces the served index and returns the previous one.
    pub fn swap(&self, index: QueryIndex) -> Arc<QueryIndex> {
        let mut guard = self.current.write().unwrap_or_else(|e| e.into_inner());
        std::mem::replace(&mut *guard, Arc::new(index))
    }

    /// Rebuilds the index from the snapshot directory. On failure the old
    /// index stays in place.
    pub fn reload(&self) -> Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let index = QueryIndex::load(dir)?;
        self.swap(index);
        log::info!("reloaded snapshot from {}", dir.display());
        Ok(())
    }
}
