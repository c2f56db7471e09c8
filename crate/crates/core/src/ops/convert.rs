use crate::raster::{Image, PixelFormat};

/// Rec. 601 luma: `round(0.299 R + 0.587 G + 0.114 B)`. Gray input is
/// returned unchanged.
pub fn to_grayscale(img: &Image) -> Image {
    if img.format() == PixelFormat::Gray8 {
        return img.clone();
    }
    let data = img
        .as_bytes()
        .chunks_exact(3)
        .map(|p| luma(p[0], p[1], p[2]))
        .collect();
    Image::gray(img.width(), img.height(), data).expect("same dimensions")
}

#[inline]
pub(crate) fn luma(r: u8, g: u8, b: u8) -> u8 {
    // Exact in integers: round((299 R + 587 G + 114 B) / 1000).
    let s = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((s + 500) / 1000) as u8
}
