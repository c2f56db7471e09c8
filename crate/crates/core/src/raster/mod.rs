//! Raster buffers and lossless file codecs.

mod image;
mod png;
mod ppm;

pub use self::image::{FloatPlane, Image, PixelCoord, PixelFormat};
pub use self::png::{decode_png, encode_png, PNG_SIGNATURE};
pub use self::ppm::{decode_ppm, encode_ppm};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RasterError {
    #[error("invalid image dimensions {width}x{height}")]
    InvalidDimension { width: usize, height: usize },
    #[error("pixel ({x}, {y}) outside {width}x{height} image")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
    #[error("expected {expected} channel values, got {actual}")]
    Arity { expected: usize, actual: usize },
    #[error("buffer holds {actual} samples, expected {expected}")]
    BufferLength { expected: usize, actual: usize },
    #[error("decode error at byte {offset}: {message}")]
    Decode { offset: usize, message: String },
    #[error("unsupported format: {0}")]
    Unsupported(String),
}
