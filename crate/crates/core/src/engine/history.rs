use std::collections::VecDeque;
use std::sync::Arc;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::catalog::Catalog;
use super::pipeline::{Block, Pipeline, SCHEMA_VERSION};
use super::state::PipelineState;
use super::EngineError;

pub const DEFAULT_HISTORY_CAPACITY: usize = 100;

#[derive(Debug, Clone)]
struct Snapshot {
    state: PipelineState,
    timestamp: DateTime<Utc>,
}

/// Undo/redo stack of pipeline states. The top of the undo stack is the
/// current state; a fresh stack holds one empty state.
#[derive(Debug, Clone)]
pub struct HistoryStack {
    undo: VecDeque<Snapshot>,
    redo: Vec<Snapshot>,
    capacity: usize,
}

impl HistoryStack {
    pub fn new(catalog: Arc<Catalog>) -> Self {
        Self::with_capacity(catalog, DEFAULT_HISTORY_CAPACITY)
    }

    /// `capacity` bounds the undo stack depth (at least 1); the oldest
    /// snapshots are dropped first.
    pub fn with_capacity(catalog: Arc<Catalog>, capacity: usize) -> Self {
        let mut undo = VecDeque::new();
        undo.push_back(Snapshot {
            state: PipelineState::empty(catalog),
            timestamp: Utc::now(),
        });
        Self {
            undo,
            redo: Vec::new(),
            capacity: capacity.max(1),
        }
    }

    pub fn current(&self) -> &PipelineState {
        &self.undo.back().expect("never empty").state
    }

    /// Mutable access for execution; caches are not edits, so this does not
    /// touch the redo stack.
    pub fn current_mut(&mut self) -> &mut PipelineState {
        &mut self.undo.back_mut().expect("never empty").state
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }

    pub fn redo_depth(&self) -> usize {
        self.redo.len()
    }

    pub fn can_undo(&self) -> bool {
        self.undo.len() > 1
    }

    pub fn can_redo(&self) -> bool {
        !self.redo.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn push(&mut self, state: PipelineState) {
        self.undo.push_back(Snapshot {
            state,
            timestamp: Utc::now(),
        });
        while self.undo.len() > self.capacity {
            self.undo.pop_front();
        }
        self.redo.clear();
    }

    /// Appends a block after validating it incrementally. On error the
    /// history is unchanged.
    pub fn append_block(&mut self, block: Block) -> Result<(), EngineError> {
        let next = self.current().append(block)?;
        self.push(next);
        Ok(())
    }

    /// Replaces the whole pipeline after validating it. On error the history
    /// is unchanged.
    pub fn replace_pipeline(&mut self, pipeline: Pipeline) -> Result<(), EngineError> {
        let next = self.current().with_pipeline(pipeline)?;
        self.push(next);
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), EngineError> {
        if !self.can_undo() {
            return Err(EngineError::EmptyStack("undo"));
        }
        let top = self.undo.pop_back().expect("depth > 1");
        self.redo.push(top);
        Ok(())
    }

    pub fn redo(&mut self) -> Result<(), EngineError> {
        let top = self.redo.pop().ok_or(EngineError::EmptyStack("redo"))?;
        self.undo.push_back(top);
        Ok(())
    }

    /// Drops cached outputs in every snapshot, e.g. when the source changes.
    pub fn clear_outputs(&mut self) {
        for s in self.undo.iter_mut().chain(self.redo.iter_mut()) {
            s.state.clear_outputs();
        }
    }

    /// Undo-stack snapshots, oldest first.
    pub fn export_history(&self) -> HistoryDocument {
        HistoryDocument {
            version: SCHEMA_VERSION,
            snapshots: self
                .undo
                .iter()
                .map(|s| HistoryRecord {
                    timestamp: s.timestamp.to_rfc3339_opts(SecondsFormat::Millis, true),
                    pipeline: s.state.pipeline().clone(),
                })
                .collect(),
        }
    }

    /// Rebuilds a history whose undo stack holds the document's snapshots.
    /// Every snapshot is re-validated.
    pub fn import(catalog: Arc<Catalog>, doc: &HistoryDocument) -> Result<Self, EngineError> {
        let mut undo = VecDeque::new();
        for record in &doc.snapshots {
            let timestamp = DateTime::parse_from_rfc3339(&record.timestamp)
                .map_err(|e| EngineError::Malformed(format!("timestamp: {e}")))?
                .with_timezone(&Utc);
            let state = PipelineState::new(Arc::clone(&catalog), record.pipeline.clone())?;
            undo.push_back(Snapshot { state, timestamp });
        }
        if undo.is_empty() {
            return Ok(Self::new(catalog));
        }
        let capacity = DEFAULT_HISTORY_CAPACITY.max(undo.len());
        Ok(Self {
            undo,
            redo: Vec::new(),
            capacity,
        })
    }
}

/// `{"version": 1, "snapshots": [{"timestamp", "pipeline"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryDocument {
    pub version: u32,
    pub snapshots: Vec<HistoryRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    /// RFC 3339 / ISO-8601 UTC timestamp.
    pub timestamp: String,
    pub pipeline: Pipeline,
}

impl HistoryDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("history serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| EngineError::Malformed(e.to_string()))?;
        match value.get("version") {
            Some(v) if v.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
            Some(v) => return Err(EngineError::SchemaVersion(v.to_string())),
            None => return Err(EngineError::Malformed("missing \"version\"".into())),
        }
        let snapshots = value
            .get("snapshots")
            .and_then(Value::as_array)
            .ok_or_else(|| EngineError::Malformed("missing \"snapshots\" array".into()))?;
        let snapshots = snapshots
            .iter()
            .map(|s| {
                let timestamp = s
                    .get("timestamp")
                    .and_then(Value::as_str)
                    .ok_or_else(|| EngineError::Malformed("snapshot without timestamp".into()))?;
                let pipeline = s
                    .get("pipeline")
                    .cloned()
                    .ok_or_else(|| EngineError::Malformed("snapshot without pipeline".into()))?;
                Ok(HistoryRecord {
                    timestamp: timestamp.to_owned(),
                    pipeline: Pipeline::from_value(pipeline)?,
                })
            })
            .collect::<Result<_, EngineError>>()?;
        Ok(Self {
            version: SCHEMA_VERSION,
            snapshots,
        })
    }
}
