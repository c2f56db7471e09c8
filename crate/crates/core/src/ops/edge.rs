//! Canny edge detection.
//!
//! Stages: 5x5 Gaussian (default sigma) -> Sobel -> direction quantized to
//! 0/45/90/135 degrees -> non-maximum suppression -> double threshold ->
//! hysteresis over 8-connectivity.

use std::collections::VecDeque;

use super::{gaussian_blur, require_gray, sobel, OpError};
use crate::raster::Image;

const STRONG: u8 = 2;
const WEAK: u8 = 1;

/// Neighbour offsets `(before, after)` along the quantized gradient
/// direction. Image y grows downwards, so a positive `gy` points down.
fn direction_neighbours(gx: f32, gy: f32) -> ((isize, isize), (isize, isize)) {
    let mut angle = f64::from(gy).atan2(f64::from(gx)).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        ((-1, 0), (1, 0))
    } else if angle < 67.5 {
        ((-1, -1), (1, 1))
    } else if angle < 112.5 {
        ((0, -1), (0, 1))
    } else {
        ((1, -1), (-1, 1))
    }
}

/// Binary edge map with samples in `{0, 255}`.
///
/// A pixel survives suppression when its magnitude is strictly greater than
/// the neighbour before it and at least the neighbour after it along the
/// gradient, so a two-pixel plateau keeps exactly its first pixel.
pub fn canny(img: &Image, low: f64, high: f64) -> Result<Image, OpError> {
    require_gray(img)?;
    if !(low >= 0.0 && low <= high && high.is_finite()) {
        return Err(OpError::Parameter(format!(
            "canny thresholds need 0 <= low <= high, got low={low} high={high}"
        )));
    }
    let smooth = gaussian_blur(img, 5, None)?;
    let grad = sobel(&smooth, 1, 1)?;
    let (w, h) = (img.width(), img.height());
    let mag = |x: isize, y: isize| -> f32 {
        if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
            0.0
        } else {
            grad.magnitude.get(x as usize, y as usize)
        }
    };

    let mut class = vec![0u8; w * h];
    let mut queue = VecDeque::new();
    for y in 0..h {
        for x in 0..w {
            let m = grad.magnitude.get(x, y);
            if f64::from(m) < low || m == 0.0 {
                continue;
            }
            let ((bx, by), (ax, ay)) = direction_neighbours(grad.gx.get(x, y), grad.gy.get(x, y));
            let (xi, yi) = (x as isize, y as isize);
            if !(m > mag(xi + bx, yi + by) && m >= mag(xi + ax, yi + ay)) {
                continue;
            }
            if f64::from(m) >= high {
                class[y * w + x] = STRONG;
                queue.push_back((x, y));
            } else {
                class[y * w + x] = WEAK;
            }
        }
    }

    // Hysteresis: promote weak pixels reachable from strong ones.
    while let Some((x, y)) = queue.pop_front() {
        for ny in y.saturating_sub(1)..=(y + 1).min(h - 1) {
            for nx in x.saturating_sub(1)..=(x + 1).min(w - 1) {
                let i = ny * w + nx;
                if class[i] == WEAK {
                    class[i] = STRONG;
                    queue.push_back((nx, ny));
                }
            }
        }
    }

    let data = class
        .into_iter()
        .map(|c| if c == STRONG { 255 } else { 0 })
        .collect();
    Ok(Image::gray(w, h, data)?)
}
