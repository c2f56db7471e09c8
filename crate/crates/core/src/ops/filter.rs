//! Linear and rank filters: generic correlation, box, Gaussian, median.

use super::{check_odd_size, round_to_u8, OpError};
use crate::raster::{FloatPlane, Image};

/// Square correlation kernel anchored at its center.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    /// `weights` is row-major, `size * size` long.
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self, OpError> {
        check_odd_size(size)?;
        if weights.len() != size * size {
            return Err(OpError::InvalidKernel(format!(
                "{size}x{size} kernel needs {} weights, got {}",
                size * size,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(OpError::InvalidKernel("weights must be finite".into()));
        }
        Ok(Self { size, weights })
    }

    pub fn uniform(size: usize) -> Result<Self, OpError> {
        Self::new(size, vec![1.0; size * size])
    }

    pub fn identity(size: usize) -> Result<Self, OpError> {
        check_odd_size(size)?;
        let mut weights = vec![0.0; size * size];
        weights[size * size / 2] = 1.0;
        Self::new(size, weights)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn anchor(&self) -> usize {
        (self.size - 1) / 2
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> f64 {
        self.weights[row * self.size + col]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Per-channel correlation (the kernel is not flipped) with replicate
/// border. With `normalize`, the response is divided by the weight sum
/// unless that sum is zero.
pub fn convolve(img: &Image, kernel: &Kernel, normalize: bool) -> Image {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let a = kernel.anchor() as isize;
    let k = kernel.size();
    let sum = kernel.sum();
    let divide = normalize && sum != 0.0;
    let mut out = Vec::with_capacity(img.as_bytes().len());
    for y in 0..h as isize {
        for x in 0..w as isize {
            for c in 0..ch {
                let mut acc = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        let wt = kernel.weight(i, j);
                        if wt != 0.0 {
                            acc += wt
                                * f64::from(img.sample_clamped(
                                    x + j as isize - a,
                                    y + i as isize - a,
                                    c,
                                ));
                        }
                    }
                }
                out.push(round_to_u8(if divide { acc / sum } else { acc }));
            }
        }
    }
    Image::from_raw(w, h, img.format(), out).expect("same dimensions")
}

/// Normalized k x k mean filter.
///
/// Window sums are computed separably in integers, so the result is the
/// exactly rounded mean.
pub fn box_blur(img: &Image, k: usize) -> Result<Image, OpError> {
    check_odd_size(k)?;
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let r = (k / 2) as isize;
    // Horizontal window sums.
    let mut rows = vec![0u32; w * h * ch];
    for y in 0..h {
        for c in 0..ch {
            for x in 0..w {
                let mut s = 0u32;
                for dx in -r..=r {
                    s += u32::from(img.sample_clamped(x as isize + dx, y as isize, c));
                }
                rows[(y * w + x) * ch + c] = s;
            }
        }
    }
    let n = (k * k) as u64;
    let mut out = vec![0u8; w * h * ch];
    for y in 0..h as isize {
        for x in 0..w {
            for c in 0..ch {
                let mut s = 0u64;
                for dy in -r..=r {
                    let yy = (y + dy).clamp(0, h as isize - 1) as usize;
                    s += u64::from(rows[(yy * w + x) * ch + c]);
                }
                // round(s / n), half away from zero
                out[(y as usize * w + x) * ch + c] = ((2 * s + n) / (2 * n)) as u8;
            }
        }
    }
    Ok(Image::from_raw(w, h, img.format(), out)?)
}

/// Sigma used when a Gaussian blur is requested without one.
pub fn default_gaussian_sigma(k: usize) -> f64 {
    0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

/// Normalized 1-D Gaussian weights for offsets `-(k-1)/2 ..= (k-1)/2`.
pub fn gaussian_weights(k: usize, sigma: f64) -> Result<Vec<f64>, OpError> {
    check_odd_size(k)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(OpError::Parameter(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let r = (k / 2) as isize;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|v| v / total).collect())
}

/// Separable Gaussian blur: a horizontal pass into a float plane, then a
/// vertical pass, rounding once at the end.
pub fn gaussian_blur(img: &Image, k: usize, sigma: Option<f64>) -> Result<Image, OpError> {
    let sigma = sigma.unwrap_or_else(|| default_gaussian_sigma(k));
    let weights = gaussian_weights(k, sigma)?;
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let r = (k / 2) as isize;
    let mut out = vec![0u8; w * h * ch];
    for c in 0..ch {
        let mut pass = FloatPlane::zeros(w, h)?;
        for y in 0..h {
            for x in 0..w {
                let acc: f64 = weights
                    .iter()
                    .zip(-r..=r)
                    .map(|(wt, d)| wt * f64::from(img.sample_clamped(x as isize + d, y as isize, c)))
                    .sum();
                pass.set(x, y, acc as f32);
            }
        }
        for y in 0..h {
            for x in 0..w {
                let acc: f64 = weights
                    .iter()
                    .zip(-r..=r)
                    .map(|(wt, d)| {
                        let yy = (y as isize + d).clamp(0, h as isize - 1) as usize;
                        wt * f64::from(pass.get(x, yy))
                    })
                    .sum();
                out[(y * w + x) * ch + c] = round_to_u8(acc);
            }
        }
    }
    Ok(Image::from_raw(w, h, img.format(), out)?)
}

/// k x k median per channel using a sliding 256-bin histogram along each row.
pub fn median_blur(img: &Image, k: usize) -> Result<Image, OpError> {
    check_odd_size(k)?;
    if k == 1 {
        return Ok(img.clone());
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let r = (k / 2) as isize;
    let rank = (k * k) / 2; // zero-based index of the median
    let mut out = vec![0u8; w * h * ch];
    let mut hist = [0u32; 256];
    for c in 0..ch {
        for y in 0..h as isize {
            hist.fill(0);
            for dy in -r..=r {
                for dx in -r..=r {
                    hist[usize::from(img.sample_clamped(dx, y + dy, c))] += 1;
                }
            }
            for x in 0..w as isize {
                if x > 0 {
                    for dy in -r..=r {
                        hist[usize::from(img.sample_clamped(x - 1 - r, y + dy, c))] -= 1;
                        hist[usize::from(img.sample_clamped(x + r, y + dy, c))] += 1;
                    }
                }
                let mut seen = 0usize;
                let mut median = 255u8;
                for (v, &count) in hist.iter().enumerate() {
                    seen += count as usize;
                    if seen > rank {
                        median = v as u8;
                        break;
                    }
                }
                out[(y as usize * w + x as usize) * ch + c] = median;
            }
        }
    }
    Ok(Image::from_raw(w, h, img.format(), out)?)
}
