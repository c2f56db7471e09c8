//! Image operators. Every function here is pure: inputs are borrowed and a
//! new buffer (or data product) is returned.
//!
//! Neighborhood operators read outside the image by clamping coordinates to
//! the nearest valid pixel (replicate border). Float-to-sample conversions
//! round half away from zero and clamp to `[0, 255]`.

mod contour;
mod convert;
mod derivative;
mod distance;
mod draw;
mod edge;
mod filter;
mod geometry;
mod histogram;
mod morphology;
mod threshold;

pub use contour::{draw_contours, find_contours, Contour, ContourSet};
pub use convert::to_grayscale;
pub use derivative::{laplacian, laplacian_field, sobel, GradientField};
pub use distance::distance_transform;
pub use draw::{draw_primitive, Shape};
pub use edge::canny;
pub use filter::{
    box_blur, convolve, default_gaussian_sigma, gaussian_blur, gaussian_weights, median_blur,
    Kernel,
};
pub use geometry::{flip, resize, rotate, FlipAxis, Interpolation, Rotation};
pub use histogram::{equalize_histogram, histogram, Histogram};
pub use morphology::{dilate, erode, morphology, MorphOp};
pub use threshold::{otsu_threshold, threshold_binary};

use thiserror::Error;

use crate::raster::{Image, PixelFormat, RasterError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("expected {expected} input, got {actual}")]
    Format {
        expected: PixelFormat,
        actual: PixelFormat,
    },
    #[error("image has no background (zero) pixel")]
    NoBackground,
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// Rounds half away from zero and clamps into the 8-bit range.
#[inline]
pub fn round_to_u8(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}

pub(crate) fn require_gray(img: &Image) -> Result<(), OpError> {
    if img.format() != PixelFormat::Gray8 {
        return Err(OpError::Format {
            expected: PixelFormat::Gray8,
            actual: img.format(),
        });
    }
    Ok(())
}

pub(crate) fn check_odd_size(k: usize) -> Result<(), OpError> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(OpError::InvalidKernel(format!(
            "size must be odd and >= 1, got {k}"
        )));
    }
    Ok(())
}
