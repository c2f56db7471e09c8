use std::sync::Arc;

use serde::Serialize;

use super::catalog::{Catalog, DataProduct, OutputFormat};
use super::pipeline::{Block, Pipeline};
use super::rules::{FormatState, RuleContext, RuleSet, RuleViolation};
use super::EngineError;
use crate::raster::Image;

/// Result of one executed stage. Images are shared, so pass-through stages
/// and history snapshots do not copy pixel data.
#[derive(Debug, Clone, PartialEq)]
pub struct StageOutput {
    pub image: Arc<Image>,
    pub product: Option<DataProduct>,
}

impl StageOutput {
    pub fn image(img: Image) -> Self {
        Self {
            image: Arc::new(img),
            product: None,
        }
    }
}

/// Runtime failure of one stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageError {
    pub stage: usize,
    pub op: String,
    pub message: String,
}

/// A validated pipeline plus its cached stage outputs.
///
/// `outputs[i]` is the result of block `i`; outputs always form a prefix of
/// the pipeline. When a stage fails, the outputs before it are kept and the
/// failure is recorded in `error`.
#[derive(Debug, Clone)]
pub struct PipelineState {
    catalog: Arc<Catalog>,
    pipeline: Pipeline,
    tail: FormatState,
    outputs: Vec<StageOutput>,
    error: Option<StageError>,
}

impl PartialEq for PipelineState {
    fn eq(&self, other: &Self) -> bool {
        self.pipeline == other.pipeline
            && self.outputs == other.outputs
            && self.error == other.error
    }
}

impl PipelineState {
    pub fn empty(catalog: Arc<Catalog>) -> Self {
        Self {
            catalog,
            pipeline: Pipeline::default(),
            tail: FormatState::Empty,
            outputs: Vec::new(),
            error: None,
        }
    }

    /// Validates `pipeline`; any violation is returned as
    /// [`EngineError::Violations`].
    pub fn new(catalog: Arc<Catalog>, pipeline: Pipeline) -> Result<Self, EngineError> {
        let (violations, tail) = RuleSet::default().run(&catalog, &pipeline)?;
        if !violations.is_empty() {
            return Err(EngineError::Violations(violations));
        }
        Ok(Self {
            catalog,
            pipeline,
            tail,
            outputs: Vec::new(),
            error: None,
        })
    }

    pub fn catalog(&self) -> &Arc<Catalog> {
        &self.catalog
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn tail_format(&self) -> FormatState {
        self.tail
    }

    pub fn outputs(&self) -> &[StageOutput] {
        &self.outputs
    }

    pub fn error(&self) -> Option<&StageError> {
        self.error.as_ref()
    }

    /// Final image, when every stage has been computed.
    pub fn final_image(&self) -> Option<&Arc<Image>> {
        if self.outputs.len() == self.pipeline.len() {
            self.outputs.last().map(|o| &o.image)
        } else {
            None
        }
    }

    /// Index of the first stage without a cached output.
    pub fn first_stale(&self) -> usize {
        self.outputs.len()
    }

    /// Incremental check of `pipeline + block`, using only the tail state
    /// and the last block.
    pub fn validate_append(&self, block: &Block) -> Result<Vec<RuleViolation>, EngineError> {
        let entry = self
            .catalog
            .get(&block.op)
            .ok_or_else(|| EngineError::UnknownOperator {
                index: self.pipeline.len(),
                op: block.op.clone(),
            })?;
        if self.pipeline.blocks.iter().any(|b| b.id == block.id) {
            return Err(EngineError::DuplicateBlockId(block.id.clone()));
        }
        let cx = RuleContext {
            index: self.pipeline.len(),
            block,
            entry,
            previous: self.pipeline.blocks.last(),
            state: self.tail,
        };
        Ok(RuleSet::default().check_block(&cx))
    }

    /// The state for `pipeline + block`, keeping every cached output.
    pub fn append(&self, block: Block) -> Result<Self, EngineError> {
        let violations = self.validate_append(&block)?;
        if !violations.is_empty() {
            return Err(EngineError::Violations(violations));
        }
        let spec = &self.catalog.get(&block.op).expect("checked").spec;
        let mut next = self.clone();
        next.tail = self.tail.after(spec);
        next.pipeline.blocks.push(block);
        Ok(next)
    }

    /// The state for a replacement pipeline. Outputs of the leading blocks
    /// the two pipelines share are kept.
    pub fn with_pipeline(&self, pipeline: Pipeline) -> Result<Self, EngineError> {
        let mut next = Self::new(Arc::clone(&self.catalog), pipeline)?;
        let keep = self.pipeline.common_prefix(&next.pipeline).min(self.outputs.len());
        next.outputs = self.outputs[..keep].to_vec();
        next.error = self.error.clone().filter(|e| e.stage < keep);
        Ok(next)
    }

    /// Drops every cached output, e.g. after the source image changed.
    pub fn clear_outputs(&mut self) {
        self.outputs.clear();
        self.error = None;
    }

    /// Recomputes stages from `from_stage` (capped at the first stale stage)
    /// to the end. Stage 0 consumes `source`. A failing stage stops the run;
    /// its error is recorded and earlier outputs are kept.
    pub fn execute(&mut self, source: &Arc<Image>, from_stage: usize) {
        let start = from_stage.min(self.outputs.len());
        self.outputs.truncate(start);
        self.error = None;
        self.execute_until(source, self.pipeline.len());
    }

    /// Computes stale stages up to, not including, `end`. Does nothing once
    /// a stage has failed. Returns whether all stages before `end` exist.
    pub fn execute_until(&mut self, source: &Arc<Image>, end: usize) -> bool {
        let end = end.min(self.pipeline.len());
        while self.error.is_none() && self.outputs.len() < end {
            let i = self.outputs.len();
            let block = &self.pipeline.blocks[i];
            let entry = self.catalog.get(&block.op).expect("validated pipeline");
            let input = match i {
                0 => source,
                _ => &self.outputs[i - 1].image,
            };
            match (entry.run)(input, &entry.resolve(block)) {
                Ok(out) => self.outputs.push(out),
                Err(e) => {
                    self.error = Some(StageError {
                        stage: i,
                        op: block.op.clone(),
                        message: e.to_string(),
                    });
                }
            }
        }
        self.outputs.len() >= end
    }

    /// What a computed stage presents: its data product for pass-through
    /// blocks that recorded one, otherwise its image.
    pub fn stage_kind(&self, stage: usize) -> Option<OutputKind> {
        let out = self.outputs.get(stage)?;
        let spec = &self.catalog.get(&self.pipeline.blocks[stage].op)?.spec;
        Some(match (&out.product, spec.output) {
            (Some(DataProduct::Histogram(_)), OutputFormat::PassThrough) => OutputKind::Histogram,
            (Some(DataProduct::Contours(_)), OutputFormat::PassThrough) => OutputKind::Contours,
            _ => OutputKind::Image,
        })
    }
}

/// Presentation class of a computed stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OutputKind {
    Image,
    Histogram,
    Contours,
}

impl OutputKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputKind::Image => "IMAGE",
            OutputKind::Histogram => "HISTOGRAM",
            OutputKind::Contours => "CONTOURS",
        }
    }
}
