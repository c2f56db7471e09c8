use std::collections::BTreeSet;

use super::OpError;
use crate::raster::{Image, PixelCoord, RasterError};

/// Drawable primitive. Coordinates may lie outside the image; anything
/// off-canvas is clipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Line { from: (i64, i64), to: (i64, i64) },
    /// Outline through two opposite corners.
    Rect { a: (i64, i64), b: (i64, i64) },
    Circle { center: (i64, i64), radius: i64 },
}

fn bresenham(from: (i64, i64), to: (i64, i64), out: &mut BTreeSet<(i64, i64)>) {
    let (mut x, mut y) = from;
    let dx = (to.0 - x).abs();
    let dy = -(to.1 - y).abs();
    let sx = if x < to.0 { 1 } else { -1 };
    let sy = if y < to.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        out.insert((x, y));
        if (x, y) == to {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

fn midpoint_circle(c: (i64, i64), r: i64, out: &mut BTreeSet<(i64, i64)>) {
    let (mut x, mut y) = (r, 0i64);
    let mut d = 1 - r;
    while x >= y {
        for (px, py) in [
            (x, y),
            (y, x),
            (-y, x),
            (-x, y),
            (-x, -y),
            (-y, -x),
            (y, -x),
            (x, -y),
        ] {
            out.insert((c.0 + px, c.1 + py));
        }
        y += 1;
        if d < 0 {
            d += 2 * y + 1;
        } else {
            x -= 1;
            d += 2 * (y - x) + 1;
        }
    }
}

/// Stroke pixels of `shape` before thickening and clipping.
pub(crate) fn stroke(shape: Shape) -> BTreeSet<(i64, i64)> {
    let mut pts = BTreeSet::new();
    match shape {
        Shape::Line { from, to } => bresenham(from, to, &mut pts),
        Shape::Rect { a, b } => {
            let corners = [a, (b.0, a.1), b, (a.0, b.1)];
            for i in 0..4 {
                bresenham(corners[i], corners[(i + 1) % 4], &mut pts);
            }
        }
        Shape::Circle { center, radius } => midpoint_circle(center, radius, &mut pts),
    }
    pts
}

/// Draws `shape` in `color` (one value per channel). The stroke is
/// thickened with a `thickness x thickness` square.
pub fn draw_primitive(
    img: &Image,
    shape: Shape,
    color: &[u8],
    thickness: usize,
) -> Result<Image, OpError> {
    if color.len() != img.channels() {
        return Err(RasterError::Arity {
            expected: img.channels(),
            actual: color.len(),
        }
        .into());
    }
    if thickness == 0 {
        return Err(OpError::Parameter("thickness must be >= 1".into()));
    }
    if let Shape::Circle { radius, .. } = shape {
        if radius < 0 {
            return Err(OpError::Parameter(format!("radius must be >= 0, got {radius}")));
        }
    }
    let lo = -((thickness as i64 - 1) / 2);
    let hi = thickness as i64 / 2;
    let mut out = img.clone();
    for (x, y) in stroke(shape) {
        for oy in lo..=hi {
            for ox in lo..=hi {
                let (px, py) = (x + ox, y + oy);
                if px >= 0 && py >= 0 && (px as usize) < img.width() && (py as usize) < img.height() {
                    out.put_pixel(PixelCoord::new(px as usize, py as usize), color)?;
                }
            }
        }
    }
    Ok(out)
}
