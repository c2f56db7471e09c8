use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::EngineError;

pub const SCHEMA_VERSION: u32 = 1;

/// One pipeline step: an operator id bound to parameter values.
///
/// Parameters are kept exactly as written; defaults are filled in only when
/// the block runs, so documents round-trip unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: String,
    pub op: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

impl Block {
    pub fn new(id: impl Into<String>, op: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            op: op.into(),
            params: Map::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.params.insert(name.to_owned(), value.into());
        self
    }

    /// Same operator and parameters; the instance id is ignored.
    pub fn same_step(&self, other: &Block) -> bool {
        self.op == other.op && self.params == other.params
    }
}

/// Linear block sequence; block `i + 1` consumes block `i`'s image.
///
/// Serializes as the pipeline/template document
/// `{"version": 1, "blocks": [{"id", "op", "params"}...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub version: u32,
    pub blocks: Vec<Block>,
}

impl Default for Pipeline {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl Pipeline {
    pub fn new(blocks: Vec<Block>) -> Self {
        Self {
            version: SCHEMA_VERSION,
            blocks,
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Parses a pipeline document without validating it against a catalog.
    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| EngineError::Malformed(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, EngineError> {
        match value.get("version") {
            Some(v) if v.as_u64() == Some(u64::from(SCHEMA_VERSION)) => {}
            Some(v) => return Err(EngineError::SchemaVersion(v.to_string())),
            None => return Err(EngineError::Malformed("missing \"version\"".into())),
        }
        serde_json::from_value(value).map_err(|e| EngineError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pipeline serializes")
    }

    /// Index of the first block where the two pipelines differ (as steps),
    /// or the shorter length when one is a prefix of the other.
    pub fn common_prefix(&self, other: &Pipeline) -> usize {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .take_while(|(a, b)| a.same_step(b))
            .count()
    }
}
