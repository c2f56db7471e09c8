//! Block-based image processing workbench core.
//!
//! * [`raster`]: 8-bit image buffers and PNG/PPM codecs.
//! * [`ops`]: the image operators.
//! * [`engine`]: operator catalog, rule-engine validation, staged
//!   execution, undo/redo history, and template documents.

pub mod engine;
pub mod ops;
pub mod raster;

pub use engine::{
    Block, BlockSpec, Catalog, DataProduct, EngineError, FormatState, HistoryStack, Pipeline,
    PipelineState, RuleViolation, StageOutput, ViolationCode,
};
pub use ops::{ContourSet, GradientField, Histogram, Kernel, OpError};
pub use raster::{FloatPlane, Image, PixelCoord, PixelFormat, RasterError};
