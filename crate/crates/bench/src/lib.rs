//! Synthetic inputs shared by the benchmarks.

use imagelab_core::Image;

/// Smooth gradients plus a deterministic high-frequency texture.
pub fn textured_gray(w: usize, h: usize) -> Image {
    let data = (0..h)
        .flat_map(|y| (0..w).map(move |x| ((x * 3 + y * 5) / 4 + (x * y * 7919) % 61) as u8))
        .collect();
    Image::gray(w, h, data).unwrap()
}

pub fn textured_rgb(w: usize, h: usize) -> Image {
    let g = textured_gray(w, h);
    let data = g
        .as_bytes()
        .iter()
        .enumerate()
        .flat_map(|(i, &v)| [v, v.wrapping_add((i % 97) as u8), 255 - v])
        .collect();
    Image::rgb(w, h, data).unwrap()
}

pub fn binary(w: usize, h: usize) -> Image {
    textured_gray(w, h).map_samples(|v| if v > 128 { 255 } else { 0 })
}
