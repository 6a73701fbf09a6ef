use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use classilist_core::ingestion::fingerprint;
use classilist_core::Dataset;

/// One immutable dataset version together with its content hash.
#[derive(Debug)]
pub struct Snapshot {
    pub dataset: Dataset,
    pub fingerprint: String,
}

impl Snapshot {
    pub fn new(dataset: Dataset) -> Self {
        let fingerprint = fingerprint(&dataset);
        Self { dataset, fingerprint }
    }
}

/// Shared server state. Requests clone the current `Arc<Snapshot>` once and
/// work on it; `replace` swaps in a fully built snapshot.
#[derive(Clone, Default)]
pub struct AppState {
    current: Arc<RwLock<Option<Arc<Snapshot>>>>,
    assets: Option<PathBuf>,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_dataset(dataset: Dataset) -> Self {
        let state = Self::new();
        state.replace(dataset);
        state
    }

    /// Directory of static UI files served at `/`.
    pub fn with_assets(mut self, dir: impl Into<PathBuf>) -> Self {
        self.assets = Some(dir.into());
        self
    }

    pub fn assets(&self) -> Option<&PathBuf> {
        self.assets.as_ref()
    }

    pub fn snapshot(&self) -> Option<Arc<Snapshot>> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Hashes and installs `dataset`, returning the previous snapshot.
    pub fn replace(&self, dataset: Dataset) -> Option<Arc<Snapshot>> {
        let next = Arc::new(Snapshot::new(dataset));
        let mut slot = self.current.write().unwrap_or_else(|e| e.into_inner());
        slot.replace(next)
    }
}
