//! The rule engine: abstract format simulation plus a table of sequencing rules.

use std::collections::HashSet;

use serde::Serialize;

use super::catalog::{BlockSpec, Catalog, CatalogEntry, InputRequirement, OutputFormat};
use super::pipeline::{Block, Pipeline};
use super::EngineError;

/// Abstract image content tracked through a pipeline during validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FormatState {
    Empty,
    Color,
    Gray,
    Binary,
}

impl FormatState {
    /// Whether an image in this state may feed a block with requirement `req`.
    pub fn satisfies(self, req: InputRequirement) -> bool {
        use FormatState as F;
        match req {
            InputRequirement::None => true,
            InputRequirement::AnyImage => self != F::Empty,
            InputRequirement::Gray => matches!(self, F::Gray | F::Binary),
            InputRequirement::Binary => self == F::Binary,
        }
    }

    /// State after a block with `spec` consumes an image in this state.
    pub fn after(self, spec: &BlockSpec) -> FormatState {
        if spec.is_source {
            return FormatState::Color;
        }
        match spec.output {
            OutputFormat::Color => FormatState::Color,
            OutputFormat::Gray => FormatState::Gray,
            OutputFormat::Binary => FormatState::Binary,
            OutputFormat::Preserve | OutputFormat::PassThrough => self,
            OutputFormat::PreserveNonBinary if self == FormatState::Binary => FormatState::Gray,
            OutputFormat::PreserveNonBinary => self,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    NoSource,
    SourceNotFirst,
    DuplicateConsecutive,
    FormatMismatch,
    ParamInvalid,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::NoSource => "NO_SOURCE",
            ViolationCode::SourceNotFirst => "SOURCE_NOT_FIRST",
            ViolationCode::DuplicateConsecutive => "DUPLICATE_CONSECUTIVE",
            ViolationCode::FormatMismatch => "FORMAT_MISMATCH",
            ViolationCode::ParamInvalid => "PARAM_INVALID",
        }
    }
}

impl std::fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleViolation {
    pub rule: &'static str,
    /// Offending block, or -1 for a pipeline-level violation.
    pub index: i64,
    pub code: ViolationCode,
    pub message: String,
}

impl std::fmt::Display for RuleViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}", self.code, self.index, self.message)
    }
}

/// What a block rule sees: the block, its predecessor and the incoming state.
pub struct RuleContext<'a> {
    pub index: usize,
    pub block: &'a Block,
    pub entry: &'a CatalogEntry,
    pub previous: Option<&'a Block>,
    pub state: FormatState,
}

/// One row of the rule table. `check` returns a message when violated.
#[derive(Clone, Copy)]
pub struct Rule {
    pub id: &'static str,
    pub code: ViolationCode,
    pub summary: &'static str,
    pub check: fn(&RuleContext) -> Option<String>,
}

impl std::fmt::Debug for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Rule").field("id", &self.id).field("code", &self.code).finish()
    }
}

fn source_first(cx: &RuleContext) -> Option<String> {
    (cx.entry.spec.is_source && cx.index > 0).then(|| {
        format!("{} is a source and may only appear as block 0", cx.block.op)
    })
}

fn no_duplicate_consecutive(cx: &RuleContext) -> Option<String> {
    let prev = cx.previous?;
    (prev.op == cx.block.op).then(|| {
        format!("{} directly follows another {}", cx.block.op, prev.op)
    })
}

fn format_compatible(cx: &RuleContext) -> Option<String> {
    let need = cx.entry.spec.input;
    (!cx.state.satisfies(need)).then(|| {
        let need = serde_json::to_value(need).expect("enum");
        let have = serde_json::to_value(cx.state).expect("enum");
        format!(
            "{} needs {} input, have {}",
            cx.block.op,
            need.as_str().unwrap_or_default(),
            have.as_str().unwrap_or_default()
        )
    })
}

fn params_valid(cx: &RuleContext) -> Option<String> {
    let problems = cx.entry.check_params(cx.block);
    (!problems.is_empty()).then(|| format!("{}: {}", cx.block.op, problems.join("; ")))
}

/// Ordered rule table consulted for every block.
#[derive(Debug, Clone)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl Default for RuleSet {
    fn default() -> Self {
        Self {
            rules: vec![
                Rule {
                    id: "R1",
                    code: ViolationCode::SourceNotFirst,
                    summary: "a source block may only appear first",
                    check: source_first,
                },
                Rule {
                    id: "R2",
                    code: ViolationCode::DuplicateConsecutive,
                    summary: "adjacent blocks may not share an operator",
                    check: no_duplicate_consecutive,
                },
                Rule {
                    id: "R3",
                    code: ViolationCode::FormatMismatch,
                    summary: "the incoming format must satisfy the block's input requirement",
                    check: format_compatible,
                },
                Rule {
                    id: "PARAMS",
                    code: ViolationCode::ParamInvalid,
                    summary: "parameters must match the operator's schema",
                    check: params_valid,
                },
            ],
        }
    }
}

impl RuleSet {
    /// Violations for one block given the incoming state and predecessor.
    pub fn check_block(&self, cx: &RuleContext) -> Vec<RuleViolation> {
        self.rules
            .iter()
            .filter_map(|rule| {
                (rule.check)(cx).map(|message| RuleViolation {
                    rule: rule.id,
                    index: cx.index as i64,
                    code: rule.code,
                    message,
                })
            })
            .collect()
    }

    /// Checks ids and operators, then simulates the format state through the
    /// pipeline, collecting every violation. Returns the violations and the
    /// final state.
    pub fn run(
        &self,
        catalog: &Catalog,
        pipeline: &Pipeline,
    ) -> Result<(Vec<RuleViolation>, FormatState), EngineError> {
        let entries = resolve_entries(catalog, pipeline)?;
        let mut violations = Vec::new();
        if !pipeline.is_empty() && !entries.iter().any(|e| e.spec.is_source) {
            violations.push(RuleViolation {
                rule: "R1",
                index: -1,
                code: ViolationCode::NoSource,
                message: "pipeline has no source block".into(),
            });
        }
        let mut state = FormatState::Empty;
        for (i, (block, entry)) in pipeline.blocks.iter().zip(&entries).enumerate() {
            let cx = RuleContext {
                index: i,
                block,
                entry,
                previous: i.checked_sub(1).map(|j| &pipeline.blocks[j]),
                state,
            };
            violations.extend(self.check_block(&cx));
            state = state.after(&entry.spec);
        }
        Ok((violations, state))
    }
}

fn resolve_entries<'c>(
    catalog: &'c Catalog,
    pipeline: &Pipeline,
) -> Result<Vec<&'c CatalogEntry>, EngineError> {
    let mut seen = HashSet::new();
    pipeline
        .blocks
        .iter()
        .enumerate()
        .map(|(index, block)| {
            if !seen.insert(block.id.as_str()) {
                return Err(EngineError::DuplicateBlockId(block.id.clone()));
            }
            catalog.get(&block.op).ok_or_else(|| EngineError::UnknownOperator {
                index,
                op: block.op.clone(),
            })
        })
        .collect()
}

/// Validates `pipeline` with the default rule set. An empty list means the
/// pipeline is accepted.
pub fn validate(catalog: &Catalog, pipeline: &Pipeline) -> Result<Vec<RuleViolation>, EngineError> {
    Ok(RuleSet::default().run(catalog, pipeline)?.0)
}
