use super::catalog::Catalog;
use super::pipeline::Pipeline;
use super::rules::{RuleViolation, ViolationCode};
use super::EngineError;

pub fn save_template(pipeline: &Pipeline) -> String {
    pipeline.to_json()
}

/// Parses a template and checks operators and parameters. Sequencing rules
/// are applied when the pipeline is used (see [`super::PipelineState::new`]).
pub fn load_template(catalog: &Catalog, text: &str) -> Result<Pipeline, EngineError> {
    let pipeline = Pipeline::from_json(text)?;
    let mut ids = std::collections::HashSet::new();
    let mut violations = Vec::new();
    for (index, block) in pipeline.blocks.iter().enumerate() {
        if !ids.insert(block.id.as_str()) {
            return Err(EngineError::DuplicateBlockId(block.id.clone()));
        }
        let entry = catalog.get(&block.op).ok_or_else(|| EngineError::UnknownOperator {
            index,
            op: block.op.clone(),
        })?;
        let problems = entry.check_params(block);
        if !problems.is_empty() {
            violations.push(RuleViolation {
                rule: "PARAMS",
                index: index as i64,
                code: ViolationCode::ParamInvalid,
                message: format!("{}: {}", block.op, problems.join("; ")),
            });
        }
    }
    if !violations.is_empty() {
        return Err(EngineError::Violations(violations));
    }
    Ok(pipeline)
}
