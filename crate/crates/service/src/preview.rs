use base64::Engine as _;
use imagelab_core::engine::{DataProduct, OutputKind, PipelineState, StageOutput};
use imagelab_core::raster::encode_png;
use serde_json::{json, Value};

pub enum Payload {
    Png(Vec<u8>),
    Json(Value),
}

fn kind(state: &PipelineState, stage: usize) -> &'static str {
    state.stage_kind(stage).map_or("ERROR", OutputKind::as_str)
}

fn header(state: &PipelineState, stage: usize, kind: &str) -> serde_json::Map<String, Value> {
    let block = &state.pipeline().blocks[stage];
    let mut m = serde_json::Map::new();
    m.insert("stage".into(), json!(stage));
    m.insert("block_id".into(), json!(block.id));
    m.insert("op".into(), json!(block.op));
    m.insert("kind".into(), json!(kind));
    m
}

fn product_value(out: &StageOutput) -> Option<(&'static str, Value)> {
    match &out.product {
        Some(DataProduct::Histogram(h)) => Some(("histogram", json!(h))),
        Some(DataProduct::Contours(c)) => Some(("contours", json!(c))),
        None => None,
    }
}

/// Full preview record for `stage`, with IMAGE payloads inlined as base64
/// PNG. `None` when the stage has neither an output nor the error.
pub fn record(state: &PipelineState, stage: usize) -> Option<Value> {
    if let Some(out) = state.outputs().get(stage) {
        let kind = kind(state, stage);
        let mut m = header(state, stage, kind);
        m.insert("width".into(), json!(out.image.width()));
        m.insert("height".into(), json!(out.image.height()));
        m.insert("format".into(), json!(out.image.format()));
        if kind == "IMAGE" {
            let png = base64::engine::general_purpose::STANDARD.encode(encode_png(&out.image));
            m.insert("png".into(), json!(png));
        }
        if let Some((key, v)) = product_value(out) {
            m.insert(key.into(), v);
        }
        return Some(Value::Object(m));
    }
    let err = state.error().filter(|e| e.stage == stage)?;
    let mut m = header(state, stage, "ERROR");
    m.insert(
        "error".into(),
        json!({"code": "STAGE_FAILED", "message": err.message}),
    );
    Some(Value::Object(m))
}

pub fn all(state: &PipelineState) -> Vec<Value> {
    let n = state.outputs().len() + usize::from(state.error().is_some());
    (0..n).filter_map(|i| record(state, i)).collect()
}

/// Body for `GET previews/{stage}`: raw PNG for IMAGE stages, otherwise
/// the JSON record.
pub fn payload(state: &PipelineState, stage: usize) -> Option<Payload> {
    match state.outputs().get(stage) {
        Some(out) if kind(state, stage) == "IMAGE" => Some(Payload::Png(encode_png(&out.image))),
        Some(out) => {
            let mut m = header(state, stage, kind(state, stage));
            if let Some((key, v)) = product_value(out) {
                m.insert(key.into(), v);
            }
            Some(Payload::Json(Value::Object(m)))
        }
        None => record(state, stage).map(Payload::Json),
    }
}
