//! End-to-end scenarios driven through the `imagelab` binary.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use imagelab_core::raster::decode_png;
use imagelab_core::Image;
use serde_json::{json, Value};

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn imagelab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imagelab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn imagelab")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn pipeline(blocks: &[(&str, &str, Value)]) -> Value {
    json!({
        "version": 1,
        "blocks": blocks.iter().map(|(id, op, params)| json!({"id": id, "op": op, "params": params})).collect::<Vec<_>>(),
    })
}

pub fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn read_png(path: &Path) -> Result<Image, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    decode_png(&bytes).map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs `doc` on `input` in `dir`, returning the process output.
pub fn run(dir: &Path, doc: &Value, input: &Path, output: &str, dump: Option<&str>) -> Output {
    let doc_path = write_json(dir, "pipeline.json", doc);
    let mut args = vec![
        "run".to_owned(),
        "--pipeline".into(),
        doc_path.display().to_string(),
        "--input".into(),
        input.display().to_string(),
        "--output".into(),
        output.into(),
    ];
    if let Some(d) = dump {
        args.extend(["--dump-stages".into(), d.into()]);
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    imagelab(&args, dir)
}

pub fn task1_doc() -> Value {
    pipeline(&[
        ("read", "READ_IMAGE", json!({})),
        ("gray", "TO_GRAYSCALE", json!({})),
        ("otsu", "OTSU", json!({})),
        ("dilate", "DILATE", json!({"k": 3})),
        ("erode", "ERODE", json!({"k": 3})),
    ])
}

/// READ, TO_GRAYSCALE, OTSU, DILATE 3, ERODE 3 on a natural photograph.
pub fn task1() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = run(dir.path(), &task1_doc(), &fixture("camera.png"), "final.png", Some("stages"));
    ensure!(code(&out) == 0, "exit {} stderr {}", code(&out), String::from_utf8_lossy(&out.stderr));

    let stages = dir.path().join("stages");
    let mut names: Vec<String> = fs::read_dir(&stages)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let expected: Vec<String> = ["READ_IMAGE", "TO_GRAYSCALE", "OTSU", "DILATE", "ERODE"]
        .iter()
        .enumerate()
        .map(|(i, op)| format!("stage-{i:02}-{op}.png"))
        .collect();
    ensure!(names == expected, "dumps {names:?}");

    let otsu = read_png(&stages.join(&expected[2]))?;
    let last = read_png(&stages.join(&expected[4]))?;
    let final_img = read_png(&dir.path().join("final.png"))?;
    ensure!(final_img == last, "final output differs from the last stage dump");
    ensure!(otsu.as_bytes().iter().all(|&v| v == 0 || v == 255), "OTSU stage is not binary");
    let changed = otsu.as_bytes().iter().zip(final_img.as_bytes()).filter(|(a, b)| a != b).count();
    ensure!(changed > 0, "closing left the thresholded image unchanged");
    Ok(format!("exit 0, 5 stage dumps, closing changed {changed} of {} pixels", otsu.as_bytes().len()))
}

fn blurred(dir: &Path, input: &Path, k: i64) -> Result<Image, String> {
    let doc = pipeline(&[("read", "READ_IMAGE", json!({})), ("blur", "BOX_BLUR", json!({"k": k}))]);
    let name = format!("box{k}.png");
    let out = run(dir, &doc, input, &name, None);
    ensure!(code(&out) == 0, "BOX_BLUR {k}: exit {}", code(&out));
    read_png(&dir.join(name))
}

/// Sample variance of the 3x3 and 7x7 box-blurred outputs against the input.
pub fn task2(variance: fn(&[u8]) -> f64) -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input_path = fixture("camera.png");
    let input = read_png(&input_path)?;
    let (v0, v3, v7) = (
        variance(input.as_bytes()),
        variance(blurred(dir.path(), &input_path, 3)?.as_bytes()),
        variance(blurred(dir.path(), &input_path, 7)?.as_bytes()),
    );
    ensure!(v7 < v3 && v3 < v0, "variances input {v0:.2}, 3x3 {v3:.2}, 7x7 {v7:.2}");

    let flat = Image::gray(16, 16, vec![77; 256]).unwrap();
    let flat_path = dir.path().join("flat.png");
    fs::write(&flat_path, imagelab_core::raster::encode_png(&flat)).unwrap();
    let (f3, f7) = (
        variance(blurred(dir.path(), &flat_path, 3)?.as_bytes()),
        variance(blurred(dir.path(), &flat_path, 7)?.as_bytes()),
    );
    ensure!(f3 == 0.0 && f7 == 0.0, "constant image gained variance: {f3} {f7}");
    Ok(format!("camera: 7x7 {v7:.2} < 3x3 {v3:.2} < input {v0:.2}; constant image stays at 0"))
}

/// A pipeline touching resampling, floating-point filters and contours.
pub fn busy_doc() -> Value {
    pipeline(&[
        ("read", "READ_IMAGE", json!({})),
        ("scale", "RESIZE", json!({"fx": 0.75, "fy": 0.6, "interpolation": "BILINEAR"})),
        ("rot", "ROTATE", json!({"angle": "90"})),
        ("gray", "TO_GRAYSCALE", json!({})),
        ("gauss", "GAUSSIAN_BLUR", json!({"k": 5, "sigma": 1.3})),
        ("sharp", "SHARPEN", json!({"amount": 0.7})),
        ("hist", "HISTOGRAM", json!({})),
        ("canny", "CANNY", json!({"low": 40, "high": 120})),
        ("contours", "FIND_CONTOURS", json!({})),
        ("dist", "DISTANCE_TRANSFORM", json!({})),
    ])
}

fn snapshot(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("stages")] {
        for e in fs::read_dir(&sub).map_err(|e| e.to_string())? {
            let e = e.unwrap();
            if e.file_type().unwrap().is_file() && e.file_name() != "pipeline.json" {
                files.push((e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()));
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Repeated runs write byte-identical outputs and stage dumps.
pub fn cli_determinism(runs: usize) -> Check {
    let mut reference: Option<Vec<(String, Vec<u8>)>> = None;
    for (doc, input, output) in [
        (busy_doc(), "astronaut.png", "out.png"),
        (task1_doc(), "camera.png", "out.ppm"),
    ] {
        reference = None;
        for _ in 0..runs {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let out = run(dir.path(), &doc, &fixture(input), output, Some("stages"));
            ensure!(code(&out) == 0, "exit {}: {}", code(&out), String::from_utf8_lossy(&out.stderr));
            let files = snapshot(dir.path())?;
            match &reference {
                None => reference = Some(files),
                Some(r) => ensure!(*r == files, "run differs from the first ({input} -> {output})"),
            }
        }
    }
    let n = reference.map_or(0, |r| r.len());
    Ok(format!("{runs} runs each of 2 pipelines: outputs and {n} artifacts byte-identical"))
}
