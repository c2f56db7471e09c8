//! Block catalog, rule-engine validation, staged execution and history.

mod catalog;
mod history;
mod params;
mod pipeline;
mod rules;
mod state;
mod template;

pub use catalog::{
    BlockSpec, Catalog, CatalogEntry, Category, DataProduct, InputRequirement, OutputFormat,
    RunFn,
};
pub use history::{HistoryDocument, HistoryRecord, HistoryStack, DEFAULT_HISTORY_CAPACITY};
pub use params::{check_params, ParamKind, ParamSpec, ParamValues};
pub use pipeline::{Block, Pipeline, SCHEMA_VERSION};
pub use rules::{
    validate, FormatState, Rule, RuleContext, RuleSet, RuleViolation, ViolationCode,
};
pub use state::{OutputKind, PipelineState, StageError, StageOutput};
pub use template::{load_template, save_template};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("unknown operator \"{op}\" at block {index}")]
    UnknownOperator { index: usize, op: String },
    #[error("duplicate block id \"{0}\"")]
    DuplicateBlockId(String),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unsupported schema version {0}")]
    SchemaVersion(String),
    #[error("pipeline rejected with {} violation(s)", .0.len())]
    Violations(Vec<RuleViolation>),
    #[error("nothing to {0}")]
    EmptyStack(&'static str),
}
