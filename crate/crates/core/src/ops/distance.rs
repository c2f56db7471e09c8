use super::{require_gray, OpError};
use crate::raster::{FloatPlane, Image};

/// Exact city-block (L1) distance from every pixel to the nearest zero
/// pixel, computed with a forward and a backward raster pass.
///
/// Zero samples are background; any nonzero sample is foreground.
pub fn distance_transform(img: &Image) -> Result<FloatPlane, OpError> {
    require_gray(img)?;
    let (w, h) = (img.width(), img.height());
    let data = img.as_bytes();
    if !data.contains(&0) {
        return Err(OpError::NoBackground);
    }
    let inf = (w + h) as u32;
    let mut d: Vec<u32> = data.iter().map(|&v| if v == 0 { 0 } else { inf }).collect();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if y > 0 {
                d[i] = d[i].min(d[i - w] + 1);
            }
            if x > 0 {
                d[i] = d[i].min(d[i - 1] + 1);
            }
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            let i = y * w + x;
            if y + 1 < h {
                d[i] = d[i].min(d[i + w] + 1);
            }
            if x + 1 < w {
                d[i] = d[i].min(d[i + 1] + 1);
            }
        }
    }
    Ok(FloatPlane::from_raw(w, h, d.into_iter().map(|v| v as f32).collect())?)
}
