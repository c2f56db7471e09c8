use std::cmp::Ordering;

use super::{histogram, require_gray, OpError};
use crate::raster::Image;

/// `maxval` where the sample is strictly greater than `t`, else 0.
pub fn threshold_binary(img: &Image, t: u8, maxval: u8) -> Result<Image, OpError> {
    require_gray(img)?;
    Ok(img.map_samples(|v| if v > t { maxval } else { 0 }))
}

/// Otsu's global threshold. Returns the level and the image binarized at
/// it with maxval 255.
pub fn otsu_threshold(img: &Image) -> Result<(u8, Image), OpError> {
    require_gray(img)?;
    let hist = histogram(img);
    let t = otsu_level(&hist.bins[0]);
    Ok((t, threshold_binary(img, t, 255)?))
}

/// Between-class variance of the split `{v <= t} / {v > t}` up to the
/// constant factor `1 / N^2`, kept as the exact fraction `D^2 / (n0 n1)`
/// with `D = S0 N - S n0`.
#[derive(Debug, Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn zero() -> Self {
        Self { num: 0, den: 1 }
    }
}

/// Exact ordering of two between-class variance scores.
fn between_class_variance_cmp(a_num: u128, a_den: u128, b_num: u128, b_den: u128) -> Ordering {
    let (qa, ra) = (a_num / a_den, a_num % a_den);
    let (qb, rb) = (b_num / b_den, b_num % b_den);
    match qa.cmp(&qb) {
        Ordering::Equal => match (ra.checked_mul(b_den), rb.checked_mul(a_den)) {
            (Some(l), Some(r)) => l.cmp(&r),
            _ => (ra as f64 / a_den as f64).total_cmp(&(rb as f64 / b_den as f64)),
        },
        o => o,
    }
}

/// Level in `0..=254` maximizing the between-class variance of `bins`;
/// the smallest maximizer wins.
pub(crate) fn otsu_level(bins: &[u64; 256]) -> u8 {
    let total: u64 = bins.iter().sum();
    let sum: u128 = bins
        .iter()
        .enumerate()
        .map(|(v, &n)| v as u128 * u128::from(n))
        .sum();
    let n = i128::from(total as i64);
    let mut best_t = 0u8;
    let mut best = Score::zero();
    let mut n0 = 0u64;
    let mut s0 = 0u128;
    for (t, &count) in bins.iter().enumerate().take(255) {
        n0 += count;
        s0 += t as u128 * u128::from(count);
        let n1 = total - n0;
        let score = if n0 == 0 || n1 == 0 {
            Score::zero()
        } else {
            let d = (s0 as i128) * n - (sum as i128) * i128::from(n0 as i64);
            match d.unsigned_abs().checked_mul(d.unsigned_abs()) {
                Some(num) => Score {
                    num,
                    den: u128::from(n0) * u128::from(n1),
                },
                None => {
                    // Beyond u128: fall back to floating point.
                    let v = (d as f64).powi(2) / (n0 as f64 * n1 as f64);
                    Score {
                        num: v as u128,
                        den: 1,
                    }
                }
            }
        };
        if between_class_variance_cmp(score.num, score.den, best.num, best.den) == Ordering::Greater {
            best = score;
            best_t = t as u8;
        }
    }
    best_t
}
