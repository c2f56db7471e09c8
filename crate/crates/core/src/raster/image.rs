use serde::{Deserialize, Serialize};
use std::fmt;

use super::RasterError;

/// Channel layout of an [`Image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PixelFormat {
    Gray8,
    Rgb8,
}

impl PixelFormat {
    pub fn channels(self) -> usize {
        match self {
            PixelFormat::Gray8 => 1,
            PixelFormat::Rgb8 => 3,
        }
    }
}

impl fmt::Display for PixelFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PixelFormat::Gray8 => "GRAY8",
            PixelFormat::Rgb8 => "RGB8",
        })
    }
}

/// Zero-based pixel position, `x` to the right and `y` downwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PixelCoord {
    pub x: usize,
    pub y: usize,
}

impl PixelCoord {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Owned 8-bit raster, interleaved and row-major with no row padding.
///
/// Every constructor checks `data.len() == width * height * channels`, so
/// a value of this type always has a well-formed buffer.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: usize,
    height: usize,
    format: PixelFormat,
    data: Vec<u8>,
}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("format", &self.format)
            .finish_non_exhaustive()
    }
}

impl Image {
    /// Creates an image with every sample set to `fill`.
    pub fn new(
        width: usize,
        height: usize,
        format: PixelFormat,
        fill: u8,
    ) -> Result<Self, RasterError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            format,
            data: vec![fill; width * height * format.channels()],
        })
    }

    pub fn from_raw(
        width: usize,
        height: usize,
        format: PixelFormat,
        data: Vec<u8>,
    ) -> Result<Self, RasterError> {
        check_dims(width, height)?;
        let expected = width * height * format.channels();
        if data.len() != expected {
            return Err(RasterError::BufferLength {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            format,
            data,
        })
    }

    pub fn gray(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        Self::from_raw(width, height, PixelFormat::Gray8, data)
    }

    pub fn rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        Self::from_raw(width, height, PixelFormat::Rgb8, data)
    }

    /// Builds a single-channel image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn_gray(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, RasterError> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            format: PixelFormat::Gray8,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn format(&self) -> PixelFormat {
        self.format
    }

    pub fn channels(&self) -> usize {
        self.format.channels()
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn contains(&self, at: PixelCoord) -> bool {
        at.x < self.width && at.y < self.height
    }

    #[inline]
    fn offset(&self, x: usize, y: usize) -> usize {
        (y * self.width + x) * self.channels()
    }

    /// Samples of the pixel at `at` (one value for gray, three for RGB).
    pub fn get_pixel(&self, at: PixelCoord) -> Result<&[u8], RasterError> {
        if !self.contains(at) {
            return Err(self.bounds_error(at));
        }
        let i = self.offset(at.x, at.y);
        Ok(&self.data[i..i + self.channels()])
    }

    /// Returns a copy of the image with one pixel replaced.
    pub fn set_pixel(&self, at: PixelCoord, value: &[u8]) -> Result<Image, RasterError> {
        let mut out = self.clone();
        out.put_pixel(at, value)?;
        Ok(out)
    }

    /// In-place variant of [`Image::set_pixel`] for builders that own the buffer.
    pub fn put_pixel(&mut self, at: PixelCoord, value: &[u8]) -> Result<(), RasterError> {
        if !self.contains(at) {
            return Err(self.bounds_error(at));
        }
        if value.len() != self.channels() {
            return Err(RasterError::Arity {
                expected: self.channels(),
                actual: value.len(),
            });
        }
        let i = self.offset(at.x, at.y);
        let c = self.channels();
        self.data[i..i + c].copy_from_slice(value);
        Ok(())
    }

    /// Sample of channel `c` at `(x, y)`, coordinates clamped to the image
    /// (replicate border).
    #[inline]
    pub fn sample_clamped(&self, x: isize, y: isize, c: usize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[self.offset(x, y) + c]
    }

    #[inline]
    pub fn sample(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[self.offset(x, y) + c]
    }

    /// Applies `f` to every sample, keeping dimensions and format.
    pub fn map_samples(&self, f: impl Fn(u8) -> u8) -> Image {
        Image {
            width: self.width,
            height: self.height,
            format: self.format,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn bounds_error(&self, at: PixelCoord) -> RasterError {
        RasterError::OutOfBounds {
            x: at.x,
            y: at.y,
            width: self.width,
            height: self.height,
        }
    }
}

pub(crate) fn check_dims(width: usize, height: usize) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidDimension { width, height });
    }
    Ok(())
}

/// Single-channel `f32` plane used for signed or unbounded intermediates
/// (derivatives, smoothing passes, distances).
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPlane {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl FloatPlane {
    pub fn zeros(width: usize, height: usize) -> Result<Self, RasterError> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![0.0; width * height],
        })
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<f32>) -> Result<Self, RasterError> {
        check_dims(width, height)?;
        if data.len() != width * height {
            return Err(RasterError::BufferLength {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f32) {
        self.data[y * self.width + x] = v;
    }

    /// Display conversion: `clamp(round(|v|), 0, 255)` per sample.
    pub fn to_display(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            format: PixelFormat::Gray8,
            data: self
                .data
                .iter()
                .map(|v| crate::ops::round_to_u8(f64::from(v.abs())))
                .collect(),
        }
    }
}
