use imagelab_core::engine::{InputRequirement, OutputFormat, ParamKind, ParamSpec};
use imagelab_core::{BlockSpec, Catalog};
use serde_json::Value;

fn tag<T: serde::Serialize>(v: T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}

pub fn list() -> String {
    let catalog = Catalog::standard();
    let width = catalog.specs().map(|s| s.id.len()).max().unwrap_or(0);
    catalog
        .specs()
        .map(|s| format!("{:width$}  {}\n", s.id, tag(s.category)))
        .collect()
}

fn accepts(input: InputRequirement) -> &'static str {
    match input {
        InputRequirement::None => "no input (source block, must come first)",
        InputRequirement::AnyImage => "any image (COLOR, GRAY or BINARY)",
        InputRequirement::Gray => "GRAY or BINARY",
        InputRequirement::Binary => "BINARY",
    }
}

fn produces(output: OutputFormat) -> &'static str {
    match output {
        OutputFormat::Color => "COLOR",
        OutputFormat::Gray => "GRAY",
        OutputFormat::Binary => "BINARY",
        OutputFormat::Preserve => "same format as the input",
        OutputFormat::PreserveNonBinary => "same format as the input; BINARY becomes GRAY",
        OutputFormat::PassThrough => "the input image, unchanged",
    }
}

fn schema(p: &ParamSpec) -> String {
    match &p.kind {
        ParamKind::Int { min, max, odd: true } => format!("odd integer in [{min}, {max}]"),
        ParamKind::Int { min, max, .. } => format!("integer in [{min}, {max}]"),
        ParamKind::Real { min, max, min_exclusive: true } => format!("number in ({min}, {max}]"),
        ParamKind::Real { min, max, .. } => format!("number in [{min}, {max}]"),
        ParamKind::String { max_len } => format!("string, at most {max_len} bytes"),
        ParamKind::Enum { choices } => format!("one of {}", choices.join(", ")),
        ParamKind::Coords { min, max } => format!("[x, y], integers in [{min}, {max}]"),
        ParamKind::Color => "[v] or [r, g, b], values in [0, 255]".into(),
    }
}

fn render(s: &BlockSpec) -> String {
    let mut out = format!("{} ({}, {})\n  {}\n\n", s.id, s.display_name, tag(s.category), s.description);
    out += &format!("input:  {}\noutput: {}\n\nparameters:\n", accepts(s.input), produces(s.output));
    if s.params.is_empty() {
        out += "  (none)\n";
    }
    for p in &s.params {
        let default = p.default.as_ref().map_or("optional".to_owned(), |d| format!("default {d}"));
        out += &format!("  {}: {}; {}\n    {}\n", p.name, schema(p), default, p.description);
    }
    out += &format!("\nexample: {}\n", s.example);
    out
}

/// Text for `ops describe`, or `None` for an unknown id.
pub fn describe(id: &str) -> Option<String> {
    Catalog::standard().spec(id).map(render)
}
