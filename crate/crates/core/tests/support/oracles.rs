//! Brute-force reference implementations written straight from the operator
//! definitions. They share no code with the library: plain nested loops over
//! a local grid type, exact rationals where the definition is exact.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};

/// Row-major interleaved samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub w: usize,
    pub h: usize,
    pub c: usize,
    pub data: Vec<u8>,
}

impl Grid {
    pub fn new(w: usize, h: usize, c: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), w * h * c);
        Grid { w, h, c, data }
    }

    pub fn at(&self, x: i64, y: i64, ch: usize) -> u8 {
        let x = x.max(0).min(self.w as i64 - 1) as usize;
        let y = y.max(0).min(self.h as i64 - 1) as usize;
        self.data[(y * self.w + x) * self.c + ch]
    }

    fn map_windows(&self, k: usize, f: impl Fn(&[u8]) -> u8) -> Grid {
        let r = (k / 2) as i64;
        let mut out = Vec::with_capacity(self.data.len());
        for y in 0..self.h as i64 {
            for x in 0..self.w as i64 {
                for ch in 0..self.c {
                    let mut window = Vec::with_capacity(k * k);
                    for dy in -r..=r {
                        for dx in -r..=r {
                            window.push(self.at(x + dx, y + dy, ch));
                        }
                    }
                    out.push(f(&window));
                }
            }
        }
        Grid::new(self.w, self.h, self.c, out)
    }
}

/// Round half away from zero, then clamp to the sample range.
pub fn to_sample(v: f64) -> u8 {
    let r = if v >= 0.0 { (v + 0.5).floor() } else { (v - 0.5).ceil() };
    r.clamp(0.0, 255.0) as u8
}

/// Raw correlation responses of a `k x k` kernel (row-major weights).
pub fn correlate(g: &Grid, k: usize, weights: &[f64]) -> Vec<f64> {
    let r = (k / 2) as i64;
    let mut out = Vec::new();
    for y in 0..g.h as i64 {
        for x in 0..g.w as i64 {
            for ch in 0..g.c {
                let mut acc = 0.0;
                for i in 0..k as i64 {
                    for j in 0..k as i64 {
                        acc += weights[(i * k as i64 + j) as usize] * f64::from(g.at(x + j - r, y + i - r, ch));
                    }
                }
                out.push(acc);
            }
        }
    }
    out
}

pub fn box_mean(g: &Grid, k: usize) -> Grid {
    let n = (k * k) as u64;
    g.map_windows(k, |win| {
        let s: u64 = win.iter().map(|&v| u64::from(v)).sum();
        // Ratio::round rounds half away from zero
        *Ratio::new(s, n).round().numer() as u8
    })
}

pub fn gaussian_2d(k: usize, sigma: f64) -> Vec<f64> {
    let r = (k / 2) as i64;
    let mut w = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            w.push((-((i * i + j * j) as f64) / (2.0 * sigma * sigma)).exp());
        }
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

pub fn gaussian(g: &Grid, k: usize, sigma: f64) -> Grid {
    let data = correlate(g, k, &gaussian_2d(k, sigma)).into_iter().map(to_sample).collect();
    Grid::new(g.w, g.h, g.c, data)
}

pub fn median(g: &Grid, k: usize) -> Grid {
    g.map_windows(k, |win| {
        let mut v = win.to_vec();
        v.sort_unstable();
        v[v.len() / 2]
    })
}

pub fn erode(g: &Grid, k: usize) -> Grid {
    g.map_windows(k, |win| *win.iter().min().unwrap())
}

pub fn dilate(g: &Grid, k: usize) -> Grid {
    g.map_windows(k, |win| *win.iter().max().unwrap())
}

pub const SOBEL_X: [f64; 9] = [-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0];
pub const SOBEL_Y: [f64; 9] = [-1.0, -2.0, -1.0, 0.0, 0.0, 0.0, 1.0, 2.0, 1.0];
pub const LAPLACE: [f64; 9] = [0.0, 1.0, 0.0, 1.0, -4.0, 1.0, 0.0, 1.0, 0.0];

/// Gradient magnitude `sqrt(gx^2 + gy^2)` for the selected derivative orders.
pub fn sobel_magnitude(g: &Grid, dx: bool, dy: bool) -> Vec<f64> {
    let gx = correlate(g, 3, &SOBEL_X);
    let gy = correlate(g, 3, &SOBEL_Y);
    gx.iter()
        .zip(&gy)
        .map(|(&a, &b)| {
            let a = if dx { a } else { 0.0 };
            let b = if dy { b } else { 0.0 };
            (a * a + b * b).sqrt()
        })
        .collect()
}

pub fn laplacian_abs(g: &Grid) -> Grid {
    let data = correlate(g, 3, &LAPLACE).into_iter().map(|v| to_sample(v.abs())).collect();
    Grid::new(g.w, g.h, 1, data)
}

/// Canny on an already smoothed gray grid: Sobel gradient, direction
/// quantized to 0/45/90/135 degrees, suppression against the two neighbours
/// along the gradient (strictly above the one behind, at least the one ahead,
/// outside counts as 0), double threshold, and hysteresis iterated to a
/// fixpoint over 8-neighbourhoods.
pub fn canny_from_smoothed(g: &Grid, low: f64, high: f64) -> Vec<u8> {
    let (w, h) = (g.w as i64, g.h as i64);
    let gx = correlate(g, 3, &SOBEL_X);
    let gy = correlate(g, 3, &SOBEL_Y);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| (a * a + b * b).sqrt()).collect();
    let m = |x: i64, y: i64| {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            mag[(y * w + x) as usize]
        }
    };
    let mut class = vec![0u8; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            let i = (y * w + x) as usize;
            let v = mag[i];
            if v == 0.0 || v < low {
                continue;
            }
            let mut deg = gy[i].atan2(gx[i]).to_degrees();
            if deg < 0.0 {
                deg += 180.0;
            }
            let (b, a) = if !(22.5..157.5).contains(&deg) {
                ((-1, 0), (1, 0))
            } else if deg < 67.5 {
                ((-1, -1), (1, 1))
            } else if deg < 112.5 {
                ((0, -1), (0, 1))
            } else {
                ((1, -1), (-1, 1))
            };
            if v > m(x + b.0, y + b.1) && v >= m(x + a.0, y + a.1) {
                class[i] = if v >= high { 2 } else { 1 };
            }
        }
    }
    loop {
        let mut changed = false;
        for y in 0..h {
            for x in 0..w {
                let i = (y * w + x) as usize;
                if class[i] != 1 {
                    continue;
                }
                let touches_strong = (-1..=1).any(|dy: i64| {
                    (-1..=1).any(|dx: i64| {
                        let (nx, ny) = (x + dx, y + dy);
                        nx >= 0 && ny >= 0 && nx < w && ny < h && class[(ny * w + nx) as usize] == 2
                    })
                });
                if touches_strong {
                    class[i] = 2;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    class.into_iter().map(|c| if c == 2 { 255 } else { 0 }).collect()
}

/// Exhaustive Otsu: the smallest `t` maximizing `w0 w1 (mu0 - mu1)^2` over
/// the split `{v <= t} / {v > t}`, evaluated in exact rationals.
pub fn otsu(samples: &[u8]) -> u8 {
    let n = BigInt::from(samples.len());
    let mut best_t = 0u8;
    let mut best = BigRational::from_integer(BigInt::from(0));
    for t in 0..=255u16 {
        let (lo, hi): (Vec<u8>, Vec<u8>) = samples.iter().partition(|&&v| u16::from(v) <= t);
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let mean = |s: &[u8]| {
            let sum: u64 = s.iter().map(|&v| u64::from(v)).sum();
            BigRational::new(BigInt::from(sum), BigInt::from(s.len()))
        };
        let w0 = BigRational::new(BigInt::from(lo.len()), n.clone());
        let w1 = BigRational::new(BigInt::from(hi.len()), n.clone());
        let d = mean(&lo) - mean(&hi);
        let score = w0 * w1 * d.clone() * d;
        if score > best {
            best = score;
            best_t = t as u8;
        }
    }
    best_t
}

/// L1 distance from each pixel to the nearest zero sample.
pub fn l1_distance(g: &Grid) -> Option<Vec<u32>> {
    let zeros: Vec<(i64, i64)> = (0..g.h as i64)
        .flat_map(|y| (0..g.w as i64).map(move |x| (x, y)))
        .filter(|&(x, y)| g.at(x, y, 0) == 0)
        .collect();
    if zeros.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    for y in 0..g.h as i64 {
        for x in 0..g.w as i64 {
            let d = zeros.iter().map(|&(zx, zy)| (zx - x).abs() + (zy - y).abs()).min().unwrap();
            out.push(d as u32);
        }
    }
    Some(out)
}

/// Rec. 601 luma in exact integer arithmetic: round((299 R + 587 G + 114 B) / 1000).
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    let s = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((s + 500) / 1000) as u8
}

/// Sample variance with denominator `n - 1`.
pub fn sample_variance(samples: &[u8]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    samples.iter().map(|&v| (f64::from(v) - mean).powi(2)).sum::<f64>() / (n - 1.0)
}
