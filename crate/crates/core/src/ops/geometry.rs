use serde::{Deserialize, Serialize};

use super::{round_to_u8, OpError};
use crate::raster::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Interpolation {
    Nearest,
    Bilinear,
}

/// Clockwise right-angle rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    Deg90,
    Deg180,
    Deg270,
}

impl Rotation {
    pub fn from_degrees(angle: i64) -> Result<Self, OpError> {
        match angle {
            90 => Ok(Rotation::Deg90),
            180 => Ok(Rotation::Deg180),
            270 => Ok(Rotation::Deg270),
            other => Err(OpError::Parameter(format!(
                "rotation must be 90, 180 or 270 degrees, got {other}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FlipAxis {
    /// Mirror left-right.
    H,
    /// Mirror top-bottom.
    V,
}

fn scaled_dim(dim: usize, factor: f64) -> usize {
    ((dim as f64 * factor).round() as usize).max(1)
}

/// Resamples to `max(1, round(w * fx)) x max(1, round(h * fy))` using
/// pixel-center alignment: destination index `d` reads source coordinate
/// `(d + 0.5) / f - 0.5`, clamped into the image.
pub fn resize(img: &Image, fx: f64, fy: f64, interp: Interpolation) -> Result<Image, OpError> {
    if !(fx > 0.0 && fx.is_finite() && fy > 0.0 && fy.is_finite()) {
        return Err(OpError::Parameter(format!(
            "scale factors must be positive, got fx={fx} fy={fy}"
        )));
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let (ow, oh) = (scaled_dim(w, fx), scaled_dim(h, fy));
    let src = |d: usize, f: f64, dim: usize| ((d as f64 + 0.5) / f - 0.5).clamp(0.0, (dim - 1) as f64);
    let mut out = Vec::with_capacity(ow * oh * ch);
    for dy in 0..oh {
        let sy = src(dy, fy, h);
        for dx in 0..ow {
            let sx = src(dx, fx, w);
            match interp {
                Interpolation::Nearest => {
                    let (x, y) = (sx.round() as usize, sy.round() as usize);
                    for c in 0..ch {
                        out.push(img.sample(x, y, c));
                    }
                }
                Interpolation::Bilinear => {
                    let (x0, y0) = (sx.floor() as usize, sy.floor() as usize);
                    let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
                    let (tx, ty) = (sx - x0 as f64, sy - y0 as f64);
                    for c in 0..ch {
                        let p = |x, y| f64::from(img.sample(x, y, c));
                        let top = (1.0 - tx) * p(x0, y0) + tx * p(x1, y0);
                        let bottom = (1.0 - tx) * p(x0, y1) + tx * p(x1, y1);
                        out.push(round_to_u8((1.0 - ty) * top + ty * bottom));
                    }
                }
            }
        }
    }
    Ok(Image::from_raw(ow, oh, img.format(), out)?)
}

/// Lossless clockwise rotation. For 90 degrees, source `(x, y)` lands at
/// `(h - 1 - y, x)` in the `h x w` output.
pub fn rotate(img: &Image, rotation: Rotation) -> Image {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let (ow, oh) = match rotation {
        Rotation::Deg180 => (w, h),
        _ => (h, w),
    };
    let mut out = vec![0u8; w * h * ch];
    for y in 0..h {
        for x in 0..w {
            let (nx, ny) = match rotation {
                Rotation::Deg90 => (h - 1 - y, x),
                Rotation::Deg180 => (w - 1 - x, h - 1 - y),
                Rotation::Deg270 => (y, w - 1 - x),
            };
            let d = (ny * ow + nx) * ch;
            for c in 0..ch {
                out[d + c] = img.sample(x, y, c);
            }
        }
    }
    Image::from_raw(ow, oh, img.format(), out).expect("permutation keeps size")
}

pub fn flip(img: &Image, axis: FlipAxis) -> Image {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mut out = vec![0u8; w * h * ch];
    for y in 0..h {
        for x in 0..w {
            let (nx, ny) = match axis {
                FlipAxis::H => (w - 1 - x, y),
                FlipAxis::V => (x, h - 1 - y),
            };
            let d = (ny * w + nx) * ch;
            for c in 0..ch {
                out[d + c] = img.sample(x, y, c);
            }
        }
    }
    Image::from_raw(w, h, img.format(), out).expect("permutation keeps size")
}
