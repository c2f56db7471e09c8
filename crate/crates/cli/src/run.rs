use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use imagelab_core::engine::{EngineError, OutputKind, PipelineState, StageError};
use imagelab_core::{Catalog, Pipeline, RuleViolation};
use serde::Serialize;

use crate::io::{self, ImageFormat};
use crate::{Failure, Outcome};

pub struct RunArgs {
    pub pipeline: PathBuf,
    pub input: PathBuf,
    pub output: PathBuf,
    pub dump_stages: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ValidationFailed,
    RuntimeFailed,
}

#[derive(Debug, Serialize)]
pub struct StageRecord {
    pub stage: usize,
    pub block_id: String,
    pub op: String,
    pub elapsed_ms: f64,
    pub kind: OutputKind,
    pub width: usize,
    pub height: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_path: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub status: Status,
    pub stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<StageError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// A pipeline document that did not pass the engine, as printable lines.
struct Rejected(Vec<String>);

fn load(path: &Path) -> Result<Result<PipelineState, Rejected>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let pipeline = match Pipeline::from_json(&text) {
        Ok(p) => p,
        Err(e) => return Err(Failure::io(path, e)),
    };
    let lines = match PipelineState::new(Catalog::standard(), pipeline.clone()) {
        Ok(state) => return Ok(Ok(state)),
        Err(EngineError::Violations(v)) => v.iter().map(RuleViolation::to_string).collect(),
        Err(EngineError::UnknownOperator { index, op }) => {
            vec![format!("UNKNOWN_OPERATOR {index} unknown operator \"{op}\"")]
        }
        Err(EngineError::DuplicateBlockId(id)) => {
            let index = pipeline.blocks.iter().enumerate().filter(|(_, b)| b.id == id).nth(1).map_or(0, |(i, _)| i);
            vec![format!("DUPLICATE_BLOCK_ID {index} block id \"{id}\" is used more than once")]
        }
        Err(e) => return Err(Failure::io(path, e)),
    };
    Ok(Err(Rejected(lines)))
}

pub fn validate(path: &Path) -> Result<Outcome, Failure> {
    match load(path)? {
        Ok(_) => {
            println!("ok");
            Ok(Outcome::Success)
        }
        Err(Rejected(lines)) => {
            for line in lines {
                println!("{line}");
            }
            Ok(Outcome::Validation)
        }
    }
}

pub fn run(args: &RunArgs) -> Result<Outcome, Failure> {
    ImageFormat::from_path(&args.output)?;
    let mut state = match load(&args.pipeline)? {
        Ok(state) => state,
        Err(Rejected(lines)) => {
            for line in &lines {
                println!("{line}");
            }
            println!("status validation_failed");
            let report = RunReport {
                status: Status::ValidationFailed,
                stages: Vec::new(),
                violations: lines,
                error: None,
                output: None,
            };
            write_report(args, &report)?;
            return Ok(Outcome::Validation);
        }
    };
    let blocks = state.pipeline().blocks.clone();
    if blocks.is_empty() {
        return Err(Failure::usage(format!("{}: pipeline has no blocks", args.pipeline.display())));
    }
    let writes: Vec<Option<PathBuf>> = blocks
        .iter()
        .map(|b| {
            (b.op == "WRITE_IMAGE").then(|| {
                let entry = state.catalog().get(&b.op).expect("validated");
                PathBuf::from(entry.resolve(b).str("path"))
            })
        })
        .collect();
    for path in writes.iter().flatten() {
        ImageFormat::from_path(path)?;
    }
    let source = Arc::new(io::read_image(&args.input)?);
    if let Some(dir) = &args.dump_stages {
        fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    }

    let mut stages = Vec::with_capacity(blocks.len());
    for (i, block) in blocks.iter().enumerate() {
        let started = Instant::now();
        if !state.execute_until(&source, i + 1) {
            break;
        }
        let elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
        let out = &state.outputs()[i];
        let mut record = StageRecord {
            stage: i,
            block_id: block.id.clone(),
            op: block.op.clone(),
            elapsed_ms,
            kind: state.stage_kind(i).expect("computed stage"),
            width: out.image.width(),
            height: out.image.height(),
            path: None,
            product_path: None,
        };
        if let Some(dir) = &args.dump_stages {
            let path = dir.join(format!("stage-{i:02}-{}.png", block.op));
            io::write_image(&path, &out.image)?;
            record.path = Some(path);
            if let Some(product) = &out.product {
                let path = dir.join(format!("stage-{i:02}-{}.json", block.op));
                let json = serde_json::to_vec_pretty(product).expect("serializable product");
                io::write(&path, &json)?;
                record.product_path = Some(path);
            }
        }
        if let Some(path) = &writes[i] {
            io::write_image(path, &out.image)?;
        }
        println!("{}", line(&record));
        stages.push(record);
    }

    if let Some(err) = state.error().cloned() {
        println!("status runtime_failed");
        eprintln!("imagelab: stage {} ({}) failed: {}", err.stage, err.op, err.message);
        let report = RunReport {
            status: Status::RuntimeFailed,
            stages,
            violations: Vec::new(),
            error: Some(err),
            output: None,
        };
        write_report(args, &report)?;
        return Ok(Outcome::Runtime);
    }
    let image = state.final_image().expect("all stages computed");
    io::write_image(&args.output, image)?;
    println!("status ok");
    let report = RunReport {
        status: Status::Ok,
        stages,
        violations: Vec::new(),
        error: None,
        output: Some(args.output.clone()),
    };
    write_report(args, &report)?;
    Ok(Outcome::Success)
}

fn line(r: &StageRecord) -> String {
    let mut s = format!(
        "stage {:02} {} {} {}x{} {:.3}ms",
        r.stage,
        r.op,
        r.kind.as_str(),
        r.width,
        r.height,
        r.elapsed_ms
    );
    for p in [&r.path, &r.product_path].into_iter().flatten() {
        s.push(' ');
        s.push_str(&p.display().to_string());
    }
    s
}

fn write_report(args: &RunArgs, report: &RunReport) -> Result<(), Failure> {
    match &args.report {
        Some(path) => {
            let mut json = serde_json::to_vec_pretty(report).expect("serializable report");
            json.push(b'\n');
            io::write(path, &json)
        }
        None => Ok(()),
    }
}
