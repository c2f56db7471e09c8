use std::collections::HashMap;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant};

use imagelab_core::{Catalog, HistoryStack, Image};
use tokio::sync::Mutex;

pub struct Session {
    pub source: Option<Arc<Image>>,
    pub history: HistoryStack,
}

struct Slot {
    session: Arc<Mutex<Session>>,
    last_activity: Instant,
}

/// Sessions keyed by opaque id. Each session has its own lock, so requests
/// for one session are serialized while different sessions run in parallel.
pub struct SessionStore {
    slots: StdMutex<HashMap<String, Slot>>,
    ttl: Duration,
    capacity: usize,
}

impl SessionStore {
    pub fn new(ttl: Duration, capacity: usize) -> Self {
        Self {
            slots: StdMutex::new(HashMap::new()),
            ttl,
            capacity,
        }
    }

    fn slots(&self) -> std::sync::MutexGuard<'_, HashMap<String, Slot>> {
        self.slots.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Creates a session, or returns `None` when at capacity.
    pub fn create(&self, catalog: Arc<Catalog>) -> Option<String> {
        let mut slots = self.slots();
        let now = Instant::now();
        slots.retain(|_, s| now.duration_since(s.last_activity) < self.ttl);
        if slots.len() >= self.capacity {
            return None;
        }
        let id = uuid::Uuid::new_v4().simple().to_string();
        slots.insert(
            id.clone(),
            Slot {
                session: Arc::new(Mutex::new(Session {
                    source: None,
                    history: HistoryStack::new(catalog),
                })),
                last_activity: now,
            },
        );
        Some(id)
    }

    /// Looks a session up and refreshes its activity time. Expired sessions
    /// are removed and reported as missing.
    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        let mut slots = self.slots();
        let now = Instant::now();
        let slot = slots.get_mut(id)?;
        if now.duration_since(slot.last_activity) >= self.ttl {
            slots.remove(id);
            return None;
        }
        slot.last_activity = now;
        Some(Arc::clone(&slot.session))
    }

    /// Drops every session idle for at least the TTL. Returns how many.
    pub fn reap(&self) -> usize {
        let mut slots = self.slots();
        let before = slots.len();
        let now = Instant::now();
        slots.retain(|_, s| now.duration_since(s.last_activity) < self.ttl);
        before - slots.len()
    }

    pub fn len(&self) -> usize {
        self.slots().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
