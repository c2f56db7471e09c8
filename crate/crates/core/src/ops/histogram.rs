use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{require_gray, OpError};
use crate::raster::Image;

/// 256-bin sample counts per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: Vec<[u64; 256]>,
    /// Pixel count of the source image.
    pub total: u64,
}

impl Histogram {
    pub fn channels(&self) -> usize {
        self.bins.len()
    }
}

impl Serialize for Histogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let bins: Vec<&[u64]> = self.bins.iter().map(|b| &b[..]).collect();
        let mut s = serializer.serialize_struct("Histogram", 3)?;
        s.serialize_field("channels", &self.channels())?;
        s.serialize_field("total", &self.total)?;
        s.serialize_field("bins", &bins)?;
        s.end()
    }
}

pub fn histogram(img: &Image) -> Histogram {
    let ch = img.channels();
    let mut bins = vec![[0u64; 256]; ch];
    for px in img.as_bytes().chunks_exact(ch) {
        for (c, &v) in px.iter().enumerate() {
            bins[c][usize::from(v)] += 1;
        }
    }
    Histogram {
        bins,
        total: img.pixel_count() as u64,
    }
}

/// Histogram equalization through the normalized cumulative distribution:
/// `m(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255)`, where `cdf_min`
/// is the smallest nonzero cdf value. Constant images map to 0.
pub fn equalize_histogram(img: &Image) -> Result<Image, OpError> {
    require_gray(img)?;
    let hist = histogram(img);
    let n = hist.total;
    let mut cdf = [0u64; 256];
    let mut acc = 0;
    for (v, &count) in hist.bins[0].iter().enumerate() {
        acc += count;
        cdf[v] = acc;
    }
    let cdf_min = cdf.iter().copied().find(|&c| c > 0).unwrap_or(0);
    let span = n - cdf_min;
    let mut lut = [0u8; 256];
    if span > 0 {
        for v in 0..256 {
            let num = cdf[v].saturating_sub(cdf_min);
            // round(num * 255 / span) with integers; num <= span.
            lut[v] = ((2 * num * 255 + span) / (2 * span)) as u8;
        }
    }
    Ok(img.map_samples(|v| lut[usize::from(v)]))
}
