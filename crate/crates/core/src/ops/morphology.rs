//! Grayscale erosion and dilation with a full k x k square structuring
//! element.
//!
//! The square is separable, so the window extremum is taken along rows and
//! then along columns. Clamping is per-axis, so the two 1-D passes give the
//! same result as the 2-D replicated window.

use serde::{Deserialize, Serialize};

use super::{check_odd_size, OpError};
use crate::raster::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MorphOp {
    Erode,
    Dilate,
}

pub fn morphology(img: &Image, op: MorphOp, k: usize) -> Result<Image, OpError> {
    check_odd_size(k)?;
    if k == 1 {
        return Ok(img.clone());
    }
    let pick: fn(u8, u8) -> u8 = match op {
        MorphOp::Erode => std::cmp::min,
        MorphOp::Dilate => std::cmp::max,
    };
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let r = (k / 2) as isize;

    let mut rows = vec![0u8; w * h * ch];
    for y in 0..h {
        for x in 0..w as isize {
            for c in 0..ch {
                let mut acc = img.sample_clamped(x - r, y as isize, c);
                for dx in -r + 1..=r {
                    acc = pick(acc, img.sample_clamped(x + dx, y as isize, c));
                }
                rows[(y * w + x as usize) * ch + c] = acc;
            }
        }
    }

    let mut out = vec![0u8; w * h * ch];
    for y in 0..h as isize {
        for x in 0..w {
            for c in 0..ch {
                let at = |yy: isize| rows[(yy.clamp(0, h as isize - 1) as usize * w + x) * ch + c];
                let mut acc = at(y - r);
                for dy in -r + 1..=r {
                    acc = pick(acc, at(y + dy));
                }
                out[(y as usize * w + x) * ch + c] = acc;
            }
        }
    }
    Ok(Image::from_raw(w, h, img.format(), out)?)
}

pub fn erode(img: &Image, k: usize) -> Result<Image, OpError> {
    morphology(img, MorphOp::Erode, k)
}

pub fn dilate(img: &Image, k: usize) -> Result<Image, OpError> {
    morphology(img, MorphOp::Dilate, k)
}
