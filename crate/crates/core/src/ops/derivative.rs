use super::{require_gray, OpError};
use crate::raster::{FloatPlane, Image};

/// Horizontal and vertical derivatives plus their Euclidean magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub gx: FloatPlane,
    pub gy: FloatPlane,
    pub magnitude: FloatPlane,
}

impl GradientField {
    /// `clamp(round(magnitude))` as a gray image.
    pub fn to_display(&self) -> Image {
        self.magnitude.to_display()
    }
}

/// 3x3 Sobel derivatives (correlation orientation, replicate border).
///
/// `gx` uses `[[-1,0,1],[-2,0,2],[-1,0,1]]` and `gy` its transpose. A
/// derivative whose order is 0 is left as a zero plane.
pub fn sobel(img: &Image, dx: u8, dy: u8) -> Result<GradientField, OpError> {
    require_gray(img)?;
    if dx > 1 || dy > 1 || dx + dy == 0 {
        return Err(OpError::Parameter(format!(
            "sobel orders must be 0 or 1 with at least one set, got dx={dx} dy={dy}"
        )));
    }
    let (w, h) = (img.width(), img.height());
    let mut gx = FloatPlane::zeros(w, h)?;
    let mut gy = FloatPlane::zeros(w, h)?;
    let mut magnitude = FloatPlane::zeros(w, h)?;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let p = |ox: isize, oy: isize| i32::from(img.sample_clamped(x + ox, y + oy, 0));
            let sx = if dx == 1 {
                (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1))
            } else {
                0
            };
            let sy = if dy == 1 {
                (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1))
            } else {
                0
            };
            let (ux, uy) = (x as usize, y as usize);
            gx.set(ux, uy, sx as f32);
            gy.set(ux, uy, sy as f32);
            magnitude.set(ux, uy, f64::from(sx * sx + sy * sy).sqrt() as f32);
        }
    }
    Ok(GradientField { gx, gy, magnitude })
}

/// Signed response of the 4-neighbour Laplacian `[[0,1,0],[1,-4,1],[0,1,0]]`.
pub fn laplacian_field(img: &Image) -> Result<FloatPlane, OpError> {
    require_gray(img)?;
    let (w, h) = (img.width(), img.height());
    let mut out = FloatPlane::zeros(w, h)?;
    for y in 0..h as isize {
        for x in 0..w as isize {
            let p = |ox: isize, oy: isize| i32::from(img.sample_clamped(x + ox, y + oy, 0));
            let v = p(0, -1) + p(-1, 0) + p(1, 0) + p(0, 1) - 4 * p(0, 0);
            out.set(x as usize, y as usize, v as f32);
        }
    }
    Ok(out)
}

/// Laplacian display image: `clamp(round(|response|))`.
pub fn laplacian(img: &Image) -> Result<Image, OpError> {
    Ok(laplacian_field(img)?.to_display())
}
