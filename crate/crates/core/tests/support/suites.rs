//! Randomized checks of the library against the oracles. Each suite returns
//! a one-line summary on success and the first discrepancy on failure.

#![allow(dead_code)]

use std::sync::Arc;
use std::time::Instant;

use imagelab_core::engine::{
    load_template, save_template, validate, Block, Catalog, HistoryStack, Pipeline, PipelineState,
    ViolationCode,
};
use imagelab_core::ops::{self, Kernel};
use imagelab_core::raster::{decode_png, encode_png, Image, PixelFormat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracles::{self, Grid};

pub type SuiteResult = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(img: &Image) -> Grid {
    Grid::new(img.width(), img.height(), img.channels(), img.as_bytes().to_vec())
}

/// Random image: uniform noise, a few flat levels, or a noisy gradient, so
/// that flat regions and ties occur as well as texture.
pub fn random_image(rng: &mut ChaCha8Rng, max_side: usize, format: PixelFormat) -> Image {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    let n = w * h * format.channels();
    let data: Vec<u8> = match rng.random_range(0..3) {
        0 => (0..n).map(|_| rng.random()).collect(),
        1 => {
            let levels: Vec<u8> = (0..rng.random_range(1..=4)).map(|_| rng.random()).collect();
            (0..n).map(|_| levels[rng.random_range(0..levels.len())]).collect()
        }
        _ => {
            let amp = rng.random_range(0..40);
            (0..n)
                .map(|i| {
                    let p = i / format.channels();
                    let base = ((p % w) * 255 / w.max(1) + (p / w) * 3) as i32;
                    (base + rng.random_range(-amp..=amp)).clamp(0, 255) as u8
                })
                .collect()
        }
    };
    Image::from_raw(w, h, format, data).unwrap()
}

pub fn random_gray(rng: &mut ChaCha8Rng, max_side: usize) -> Image {
    random_image(rng, max_side, PixelFormat::Gray8)
}

pub fn random_any(rng: &mut ChaCha8Rng, max_side: usize) -> Image {
    let f = if rng.random_bool(0.5) { PixelFormat::Gray8 } else { PixelFormat::Rgb8 };
    random_image(rng, max_side, f)
}

pub fn random_binary(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
    let density = rng.random_range(0.05..0.98);
    let data = (0..w * h).map(|_| if rng.random_bool(density) { 255 } else { 0 }).collect();
    Image::gray(w, h, data).unwrap()
}

fn exact(op: &str, got: &[u8], want: &[u8], img: &Image) -> Result<(), String> {
    if got == want {
        return Ok(());
    }
    let i = got.iter().zip(want).position(|(a, b)| a != b).unwrap_or(0);
    Err(format!("{op} on {img:?}: sample {i} is {} but the oracle gives {}", got[i], want[i]))
}

fn within_one(op: &str, got: &[u8], want: &[u8], img: &Image) -> Result<(), String> {
    match got.iter().zip(want).position(|(&a, &b)| a.abs_diff(b) > 1) {
        None if got.len() == want.len() => Ok(()),
        None => Err(format!("{op}: length {} vs {}", got.len(), want.len())),
        Some(i) => Err(format!("{op} on {img:?}: sample {i} is {} but the oracle gives {}", got[i], want[i])),
    }
}

/// Neighbourhood operators on `images` random images of up to 32 x 32.
pub fn operator_oracles(images: usize, seed: u64) -> SuiteResult {
    let start = Instant::now();
    let mut rng = rng(seed);
    let odd = |rng: &mut ChaCha8Rng, max: usize| 2 * rng.random_range(0..=max / 2) + 1;
    for _ in 0..images {
        let img = random_any(&mut rng, 32);
        let g = grid(&img);

        let k = odd(&mut rng, 7);
        exact("box_blur", ops::box_blur(&img, k).unwrap().as_bytes(), &oracles::box_mean(&g, k).data, &img)?;

        let k = odd(&mut rng, 7).max(3);
        let sigma = if rng.random_bool(0.5) { None } else { Some(rng.random_range(0.3..3.0)) };
        let s = sigma.unwrap_or_else(|| 0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8);
        within_one("gaussian_blur", ops::gaussian_blur(&img, k, sigma).unwrap().as_bytes(), &oracles::gaussian(&g, k, s).data, &img)?;

        let k = odd(&mut rng, 5);
        exact("median_blur", ops::median_blur(&img, k).unwrap().as_bytes(), &oracles::median(&g, k).data, &img)?;
        exact("erode", ops::erode(&img, k).unwrap().as_bytes(), &oracles::erode(&g, k).data, &img)?;
        exact("dilate", ops::dilate(&img, k).unwrap().as_bytes(), &oracles::dilate(&g, k).data, &img)?;

        let weights: Vec<f64> = (0..9).map(|_| f64::from(rng.random_range(-2i8..=2))).collect();
        let kernel = Kernel::new(3, weights.clone()).unwrap();
        let want: Vec<u8> = oracles::correlate(&g, 3, &weights).into_iter().map(oracles::to_sample).collect();
        exact("convolve", ops::convolve(&img, &kernel, false).as_bytes(), &want, &img)?;

        let gray = ops::to_grayscale(&img);
        let gg = grid(&gray);
        let (dx, dy) = [(true, false), (false, true), (true, true)][rng.random_range(0..3)];
        let field = ops::sobel(&gray, u8::from(dx), u8::from(dy)).unwrap();
        let want_gx: Vec<f32> = oracles::correlate(&gg, 3, &oracles::SOBEL_X).iter().map(|&v| if dx { v as f32 } else { 0.0 }).collect();
        if field.gx.as_slice() != want_gx.as_slice() {
            return Err(format!("sobel gx differs on {gray:?}"));
        }
        let want: Vec<u8> = oracles::sobel_magnitude(&gg, dx, dy).into_iter().map(oracles::to_sample).collect();
        within_one("sobel", field.to_display().as_bytes(), &want, &gray)?;

        exact("laplacian", ops::laplacian(&gray).unwrap().as_bytes(), &oracles::laplacian_abs(&gg).data, &gray)?;

        let low = rng.random_range(0.0..200.0);
        let high = low + rng.random_range(0.0..300.0);
        let smooth = ops::gaussian_blur(&gray, 5, None).unwrap();
        exact("canny", ops::canny(&gray, low, high).unwrap().as_bytes(), &oracles::canny_from_smoothed(&grid(&smooth), low, high), &gray)?;

        let want: Vec<u8> = match img.format() {
            PixelFormat::Gray8 => img.as_bytes().to_vec(),
            PixelFormat::Rgb8 => img.as_bytes().chunks(3).map(|p| oracles::luma(p[0], p[1], p[2])).collect(),
        };
        exact("to_grayscale", gray.as_bytes(), &want, &img)?;
    }
    Ok(format!(
        "box, gaussian, median, erode, dilate, convolve, sobel, laplacian, canny, grayscale on {images} images in {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

pub fn otsu_exact(images: usize, seed: u64) -> SuiteResult {
    let mut rng = rng(seed);
    for i in 0..images {
        let data: Vec<u8> = match i % 3 {
            0 => (0..256).map(|_| rng.random()).collect(),
            1 => {
                let (a, b) = (rng.random_range(0..128), rng.random_range(128..=255));
                (0..256).map(|_| if rng.random_bool(0.5) { a } else { b }).collect()
            }
            _ => (0..256).map(|_| rng.random_range(0..4) * 60).collect(),
        };
        let img = Image::gray(16, 16, data.clone()).unwrap();
        let (t, out) = ops::otsu_threshold(&img).unwrap();
        let want = oracles::otsu(&data);
        if t != want {
            return Err(format!("image {i}: otsu level {t}, exhaustive search gives {want}"));
        }
        let bin: Vec<u8> = data.iter().map(|&v| if v > want { 255 } else { 0 }).collect();
        exact("otsu", out.as_bytes(), &bin, &img)?;
    }
    Ok(format!("{images} random 16x16 images, exact level and output"))
}

pub fn distance_exact(images: usize, seed: u64) -> SuiteResult {
    let mut rng = rng(seed);
    let mut no_background = 0;
    for i in 0..images {
        let img = random_binary(&mut rng, 16, 16);
        match (ops::distance_transform(&img), oracles::l1_distance(&grid(&img))) {
            (Ok(plane), Some(want)) => {
                let got: Vec<u32> = plane.as_slice().iter().map(|&v| v as u32).collect();
                if got != want || plane.as_slice().iter().any(|v| v.fract() != 0.0) {
                    return Err(format!("image {i}: distance transform differs from brute force"));
                }
            }
            (Err(ops::OpError::NoBackground), None) => no_background += 1,
            (got, _) => return Err(format!("image {i}: unexpected result {got:?}")),
        }
    }
    Ok(format!("{images} random 16x16 binary images ({no_background} without background)"))
}

pub fn morphology_laws(images: usize, seed: u64) -> SuiteResult {
    let mut rng = rng(seed);
    for i in 0..images {
        let img = if i % 2 == 0 { random_any(&mut rng, 24) } else { random_binary(&mut rng, 20, 20) };
        let k = [1, 3, 5, 7][rng.random_range(0..4)];
        let e = ops::erode(&img, k).unwrap();
        let d = ops::dilate(&img, k).unwrap();
        let ordered = img
            .as_bytes()
            .iter()
            .zip(e.as_bytes().iter().zip(d.as_bytes()))
            .all(|(&x, (&lo, &hi))| lo <= x && x <= hi);
        if !ordered {
            return Err(format!("image {i}: erode <= id <= dilate fails for k={k}"));
        }
        let inv = img.map_samples(|v| 255 - v);
        if ops::dilate(&inv, k).unwrap() != e.map_samples(|v| 255 - v) {
            return Err(format!("image {i}: dilate(invert) != invert(erode) for k={k}"));
        }
        let open = |x: &Image| ops::dilate(&ops::erode(x, k).unwrap(), k).unwrap();
        let close = |x: &Image| ops::erode(&ops::dilate(x, k).unwrap(), k).unwrap();
        if open(&open(&img)) != open(&img) || close(&close(&img)) != close(&img) {
            return Err(format!("image {i}: opening/closing not idempotent for k={k}"));
        }
    }
    Ok(format!("{images} random images: ordering, duality, opening and closing idempotence"))
}

/// Our codec against itself and against the independent `png` crate.
pub fn png_round_trip(images: usize, seed: u64) -> SuiteResult {
    let mut rng = rng(seed);
    for i in 0..images {
        let img = random_any(&mut rng, 40);
        let bytes = encode_png(&img);
        let back = decode_png(&bytes).map_err(|e| format!("image {i}: {e}"))?;
        if back != img {
            return Err(format!("image {i}: decode(encode(x)) != x for {img:?}"));
        }
        if i % 10 == 0 {
            let (w, h, data) = reference_decode(&bytes);
            if (w, h) != (img.width(), img.height()) || data != img.as_bytes() {
                return Err(format!("image {i}: reference decoder disagrees"));
            }
            let theirs = reference_encode(&img);
            if decode_png(&theirs).map_err(|e| e.to_string())? != img {
                return Err(format!("image {i}: reference-encoded file decodes differently"));
            }
        }
    }
    Ok(format!("{images} random images, cross-checked against the png crate"))
}

fn reference_decode(bytes: &[u8]) -> (usize, usize, Vec<u8>) {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    buf.truncate(info.buffer_size());
    (info.width as usize, info.height as usize, buf)
}

fn reference_encode(img: &Image) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(match img.format() {
            PixelFormat::Gray8 => png::ColorType::Grayscale,
            PixelFormat::Rgb8 => png::ColorType::Rgb,
        });
        enc.set_depth(png::BitDepth::Eight);
        enc.set_filter(png::Filter::Paeth);
        let mut w = enc.write_header().unwrap();
        w.write_image_data(img.as_bytes()).unwrap();
    }
    out
}

pub fn rule_examples() -> SuiteResult {
    let cat = Catalog::standard();
    let codes = |blocks: Vec<Block>| -> Result<Vec<(ViolationCode, i64)>, String> {
        let v = validate(&cat, &Pipeline::new(blocks)).map_err(|e| e.to_string())?;
        Ok(v.into_iter().map(|v| (v.code, v.index)).collect())
    };
    let accepted = codes(vec![
        Block::new("read", "READ_IMAGE"),
        Block::new("scale", "RESIZE").with_param("fx", 0.5).with_param("fy", 0.5),
    ])?;
    if !accepted.is_empty() {
        return Err(format!("READ -> SCALE(0.5) rejected: {accepted:?}"));
    }
    let mut inverse = codes(vec![
        Block::new("scale", "RESIZE").with_param("fx", 0.5).with_param("fy", 0.5),
        Block::new("read", "READ_IMAGE"),
    ])?;
    inverse.sort_by_key(|&(_, i)| i);
    if inverse != vec![(ViolationCode::FormatMismatch, 0), (ViolationCode::SourceNotFirst, 1)] {
        return Err(format!("SCALE(0.5) -> READ gave {inverse:?}"));
    }
    let dup = codes(vec![
        Block::new("read", "READ_IMAGE"),
        Block::new("b1", "BOX_BLUR").with_param("k", 3),
        Block::new("b2", "BOX_BLUR").with_param("k", 3),
    ])?;
    if dup != vec![(ViolationCode::DuplicateConsecutive, 2)] {
        return Err(format!("duplicate blur gave {dup:?}"));
    }
    Ok("READ->SCALE accepted; SCALE->READ = SOURCE_NOT_FIRST + FORMAT_MISMATCH; BLUR,BLUR = DUPLICATE_CONSECUTIVE".into())
}

/// Operators usable in random edit sequences, with a valid first block.
const EDIT_OPS: &[&str] = &[
    "READ_IMAGE", "TO_GRAYSCALE", "BOX_BLUR", "OTSU", "DILATE", "ERODE", "FLIP", "CANNY",
    "HISTOGRAM", "FIND_CONTOURS", "DISTANCE_TRANSFORM", "MEDIAN_BLUR",
];

#[derive(Debug, Clone)]
pub enum Edit {
    Append(&'static str),
    Undo,
    Redo,
}

pub fn random_edits(rng: &mut ChaCha8Rng, n: usize) -> Vec<Edit> {
    (0..n)
        .map(|_| match rng.random_range(0..6) {
            0..=2 => Edit::Append(EDIT_OPS[rng.random_range(0..EDIT_OPS.len())]),
            3 | 4 => Edit::Undo,
            _ => Edit::Redo,
        })
        .collect()
}

/// History laws over random edit sequences: undo/redo inverse pairs,
/// redo cleared by edits, rejected edits change nothing, n appends then
/// n undos restore the start.
pub fn history_laws(cases: usize, seed: u64) -> SuiteResult {
    let mut rng = rng(seed);
    let mut counter = 0usize;
    for case in 0..cases {
        let mut h = HistoryStack::new(Catalog::standard());
        for edit in random_edits(&mut rng, 30) {
            let before = h.current().clone();
            let (u, r) = (h.undo_depth(), h.redo_depth());
            match edit {
                Edit::Append(op) => {
                    counter += 1;
                    match h.append_block(Block::new(format!("b{counter}"), op)) {
                        Ok(()) => {
                            if h.redo_depth() != 0 || h.undo_depth() != (u + 1).min(h.capacity()) {
                                return Err(format!("case {case}: append did not push and clear redo"));
                            }
                            let after = h.current().clone();
                            h.undo().map_err(|e| e.to_string())?;
                            if *h.current() != before {
                                return Err(format!("case {case}: undo after append is not the prior state"));
                            }
                            h.redo().map_err(|e| e.to_string())?;
                            if *h.current() != after {
                                return Err(format!("case {case}: redo after undo is not the post-append state"));
                            }
                        }
                        Err(_) => {
                            if (h.undo_depth(), h.redo_depth()) != (u, r) || *h.current() != before {
                                return Err(format!("case {case}: rejected append changed history"));
                            }
                        }
                    }
                }
                Edit::Undo => {
                    if h.undo().is_ok() {
                        h.redo().map_err(|e| e.to_string())?;
                        if *h.current() != before {
                            return Err(format!("case {case}: redo . undo is not identity"));
                        }
                        h.undo().unwrap();
                    } else if u != 1 {
                        return Err(format!("case {case}: undo refused at depth {u}"));
                    }
                }
                Edit::Redo => {
                    if h.redo().is_ok() {
                        h.undo().map_err(|e| e.to_string())?;
                        if *h.current() != before {
                            return Err(format!("case {case}: undo . redo is not identity"));
                        }
                        h.redo().unwrap();
                    } else if r != 0 {
                        return Err(format!("case {case}: redo refused at depth {r}"));
                    }
                }
            }
        }
        // n appends then n undos
        let start = h.current().clone();
        let n = rng.random_range(1..10);
        let mut prev = h.current().pipeline().blocks.last().map(|b| b.op.clone());
        let mut pushed = 0;
        for _ in 0..n {
            counter += 1;
            let op = if h.current().pipeline().is_empty() {
                "READ_IMAGE"
            } else if prev.as_deref() == Some("FLIP") {
                "ROTATE"
            } else {
                "FLIP"
            };
            h.append_block(Block::new(format!("b{counter}"), op)).map_err(|e| format!("case {case}: {e}"))?;
            prev = Some(op.to_owned());
            pushed += 1;
        }
        for _ in 0..pushed {
            h.undo().map_err(|e| e.to_string())?;
        }
        if *h.current() != start {
            return Err(format!("case {case}: {pushed} appends then {pushed} undos is not identity"));
        }
    }
    Ok(format!("{cases} random edit sequences of 30 steps"))
}

pub fn template_round_trip() -> SuiteResult {
    let cat = Catalog::standard();
    for spec in cat.specs() {
        let defaults = Pipeline::new(vec![Block::new("only", spec.id)]);
        let example: Block = serde_json::from_str(spec.example).map_err(|e| e.to_string())?;
        for p in [defaults, Pipeline::new(vec![example])] {
            let back = load_template(&cat, &save_template(&p)).map_err(|e| format!("{}: {e}", spec.id))?;
            if back != p {
                return Err(format!("{}: template round-trip changed the pipeline", spec.id));
            }
        }
    }
    Ok(format!("{} operators, default and example parameters", cat.len()))
}

/// `execute(from = k)` after an edit at `k` equals full re-execution.
pub fn cache_equivalence(cases: usize, seed: u64) -> SuiteResult {
    let mut rng = rng(seed);
    let cat = Catalog::standard();
    let tails = ["BOX_BLUR", "MEDIAN_BLUR", "FLIP", "DILATE", "HISTOGRAM", "SHARPEN"];
    for case in 0..cases {
        let src = Arc::new(random_any(&mut rng, 24));
        let mut blocks = vec![Block::new("r", "READ_IMAGE"), Block::new("g", "TO_GRAYSCALE")];
        for (i, op) in tails.iter().enumerate() {
            if rng.random_bool(0.6) && blocks.last().unwrap().op != *op {
                blocks.push(Block::new(format!("t{i}"), *op));
            }
        }
        let mut state = PipelineState::new(Arc::clone(&cat), Pipeline::new(blocks.clone())).map_err(|e| e.to_string())?;
        state.execute(&src, 0);
        let k = rng.random_range(2..=blocks.len());
        let mut edited = blocks.clone();
        edited.truncate(k);
        edited.push(Block::new("x", "OTSU"));
        edited.push(Block::new("y", "ERODE").with_param("k", 5));
        let mut cached = state.with_pipeline(Pipeline::new(edited.clone())).map_err(|e| e.to_string())?;
        let stale = cached.first_stale();
        if stale != k {
            return Err(format!("case {case}: first stale stage {stale}, expected {k}"));
        }
        cached.execute(&src, stale);
        let mut full = PipelineState::new(Arc::clone(&cat), Pipeline::new(edited)).map_err(|e| e.to_string())?;
        full.execute(&src, 0);
        if cached.outputs() != full.outputs() {
            return Err(format!("case {case}: cached execution differs from full re-execution"));
        }
        for i in 0..k {
            if !Arc::ptr_eq(&cached.outputs()[i].image, &state.outputs()[i].image) {
                return Err(format!("case {case}: stage {i} below the edit was recomputed"));
            }
        }
    }
    Ok(format!("{cases} random pipelines edited at a random stage"))
}
