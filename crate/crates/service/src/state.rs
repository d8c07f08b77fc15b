use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use raycut::maxflow::CutResult;
use raycut::surface::SegMesh;
use raycut::volume::{MaskVolume, Volume};
use raycut::{Error, SegParams};

/// Loaded volume and optional reference mask. Never mutated once loaded.
#[derive(Debug)]
pub struct Session {
    pub volume: Volume,
    pub truth: Option<MaskVolume>,
}

#[derive(Debug)]
pub struct StoredResult {
    pub mask: MaskVolume,
    pub mesh: SegMesh,
    pub cut: CutResult,
    pub params: SegParams,
    pub runtime_ms: f64,
}

#[derive(Debug, Default)]
struct Inner {
    session: RwLock<Option<Arc<Session>>>,
    results: Mutex<BTreeMap<u64, Arc<StoredResult>>>,
    next_id: AtomicU64,
}

/// Shared service state; cheap to clone.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    inner: Arc<Inner>,
}

impl AppState {
    /// State with nothing loaded; every endpoint answers 404 until
    /// [`AppState::load`] is called.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_volume(volume: Volume, truth: Option<MaskVolume>) -> raycut::Result<Self> {
        let state = Self::new();
        state.load(volume, truth)?;
        Ok(state)
    }

    /// Installs a volume, replacing any previous one and dropping its results.
    pub fn load(&self, volume: Volume, truth: Option<MaskVolume>) -> raycut::Result<()> {
        if let Some(t) = &truth {
            if t.dims() != volume.dims() {
                return Err(Error::GeometryMismatch);
            }
        }
        *self.inner.session.write().unwrap() = Some(Arc::new(Session { volume, truth }));
        self.inner.results.lock().unwrap().clear();
        Ok(())
    }

    pub fn session(&self) -> Option<Arc<Session>> {
        self.inner.session.read().unwrap().clone()
    }

    pub fn insert_result(&self, result: StoredResult) -> u64 {
        let mut results = self.inner.results.lock().unwrap();
        let id = self.inner.next_id.fetch_add(1, Ordering::SeqCst) + 1;
        results.insert(id, Arc::new(result));
        id
    }

    pub fn result(&self, id: u64) -> Option<Arc<StoredResult>> {
        self.inner.results.lock().unwrap().get(&id).cloned()
    }
}
