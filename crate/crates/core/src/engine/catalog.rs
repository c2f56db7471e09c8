use std::sync::{Arc, OnceLock};

use serde::Serialize;
use serde_json::{json, Value};

use super::params::{check_params, ParamKind, ParamSpec, ParamValues};
use super::pipeline::Block;
use crate::ops::{self, ContourSet, FlipAxis, Histogram, Interpolation, Kernel, OpError, Rotation, Shape};
use crate::raster::{Image, PixelFormat};
use super::state::StageOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Io,
    Geometric,
    Conversion,
    Drawing,
    Blur,
    Filter,
    Threshold,
    Derivative,
    Edge,
    Morphology,
    Segmentation,
    Contour,
    Histogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InputRequirement {
    None,
    AnyImage,
    Gray,
    Binary,
}

/// Abstract format of a block's image output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OutputFormat {
    Color,
    Gray,
    Binary,
    /// Same abstract format as the input.
    Preserve,
    /// Same as the input, except that BINARY input yields GRAY (smoothing
    /// and resampling create intermediate levels).
    PreserveNonBinary,
    /// Input image forwarded unchanged, possibly with a data product.
    PassThrough,
}

/// Non-image result recorded by a stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DataProduct {
    Histogram(Histogram),
    Contours(ContourSet),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockSpec {
    pub id: &'static str,
    pub display_name: &'static str,
    pub category: Category,
    pub params: Vec<ParamSpec>,
    pub input: InputRequirement,
    pub output: OutputFormat,
    pub is_source: bool,
    pub description: &'static str,
    /// One-line usage example as a block document.
    pub example: &'static str,
}

impl BlockSpec {
    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }
}

pub type RunFn = fn(&Arc<Image>, &ParamValues) -> Result<StageOutput, OpError>;
type ConstraintFn = fn(&ParamValues) -> Result<(), String>;

#[derive(Clone)]
pub struct CatalogEntry {
    pub spec: BlockSpec,
    pub run: RunFn,
    /// Check spanning several parameters, applied after per-parameter checks.
    pub constraint: Option<ConstraintFn>,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry").field("spec", &self.spec).finish_non_exhaustive()
    }
}

impl CatalogEntry {
    /// Problems with a block's parameters; empty when they are acceptable.
    pub fn check_params(&self, block: &Block) -> Vec<String> {
        let mut problems = check_params(&self.spec.params, &block.params);
        if problems.is_empty() {
            if let Some(constraint) = self.constraint {
                if let Err(e) = constraint(&self.resolve(block)) {
                    problems.push(e);
                }
            }
        }
        problems
    }

    pub fn resolve(&self, block: &Block) -> ParamValues {
        ParamValues::resolve(&self.spec.params, &block.params)
    }
}

/// Operator registry, ordered by category then id.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn new(mut entries: Vec<CatalogEntry>) -> Self {
        entries.sort_by(|a, b| (a.spec.category, a.spec.id).cmp(&(b.spec.category, b.spec.id)));
        Self { entries }
    }

    /// The built-in operator set, shared.
    pub fn standard() -> Arc<Catalog> {
        static STANDARD: OnceLock<Arc<Catalog>> = OnceLock::new();
        STANDARD
            .get_or_init(|| Arc::new(Catalog::new(standard_entries())))
            .clone()
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn specs(&self) -> impl Iterator<Item = &BlockSpec> {
        self.entries.iter().map(|e| &e.spec)
    }

    pub fn get(&self, id: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.spec.id == id)
    }

    pub fn spec(&self, id: &str) -> Option<&BlockSpec> {
        self.get(id).map(|e| &e.spec)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Catalog document served to clients: operator specs plus the format
    /// relation (which abstract formats each input requirement accepts).
    pub fn document(&self) -> Value {
        use super::rules::FormatState;
        let accepts = |req| {
            [FormatState::Color, FormatState::Gray, FormatState::Binary]
                .into_iter()
                .filter(|f| f.satisfies(req))
                .collect::<Vec<_>>()
        };
        json!({
            "version": super::SCHEMA_VERSION,
            "operators": self.specs().collect::<Vec<_>>(),
            "accepts": {
                "ANY_IMAGE": accepts(InputRequirement::AnyImage),
                "GRAY": accepts(InputRequirement::Gray),
                "BINARY": accepts(InputRequirement::Binary),
            },
        })
    }
}

fn int(name: &'static str, min: i64, max: i64, default: i64, description: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Int { min, max, odd: false },
        default: Some(json!(default)),
        description,
    }
}

fn odd_kernel(default: i64) -> ParamSpec {
    ParamSpec {
        name: "k",
        kind: ParamKind::Int { min: 1, max: 31, odd: true },
        default: Some(json!(default)),
        description: "Kernel side length (odd).",
    }
}

fn real(name: &'static str, min: f64, max: f64, default: Option<f64>, description: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Real { min, max, min_exclusive: true },
        default: default.map(|d| json!(d)),
        description,
    }
}

fn inclusive(mut p: ParamSpec) -> ParamSpec {
    if let ParamKind::Real { min_exclusive, .. } = &mut p.kind {
        *min_exclusive = false;
    }
    p
}

fn choice(name: &'static str, choices: &[&'static str], default: &str, description: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Enum { choices: choices.to_vec() },
        default: Some(json!(default)),
        description,
    }
}

const COORD_LIMIT: i64 = 1 << 20;

fn point(name: &'static str, default: [i64; 2], description: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Coords { min: -COORD_LIMIT, max: COORD_LIMIT },
        default: Some(json!(default)),
        description,
    }
}

fn drawing_style() -> [ParamSpec; 2] {
    [
        ParamSpec {
            name: "color",
            kind: ParamKind::Color,
            default: Some(json!([255, 0, 0])),
            description: "[v] or [r, g, b]; converted to the image's channel count.",
        },
        int("thickness", 1, 64, 1, "Stroke width in pixels."),
    ]
}

fn image(img: Image) -> Result<StageOutput, OpError> {
    Ok(StageOutput::image(img))
}

/// Adapts a drawing colour to the image's channel count.
fn paint(img: &Image, color: &[u8]) -> Vec<u8> {
    match (img.format(), color.len()) {
        (PixelFormat::Gray8, 3) => vec![ops::to_grayscale(
            &Image::rgb(1, 1, color.to_vec()).expect("one pixel"),
        )
        .as_bytes()[0]],
        (PixelFormat::Rgb8, 1) => vec![color[0]; 3],
        _ => color.to_vec(),
    }
}

fn draw(img: &Image, p: &ParamValues, shape: Shape) -> Result<StageOutput, OpError> {
    let color = paint(img, &p.color("color"));
    image(ops::draw_primitive(img, shape, &color, p.int("thickness") as usize)?)
}

/// Largest image a geometric block may produce.
const MAX_OUTPUT_PIXELS: f64 = (1u64 << 26) as f64;

fn run_resize(img: &Arc<Image>, p: &ParamValues) -> Result<StageOutput, OpError> {
    let (fx, fy) = (p.real("fx"), p.real("fy"));
    if (img.width() as f64 * fx).round() * (img.height() as f64 * fy).round() > MAX_OUTPUT_PIXELS {
        return Err(OpError::Parameter("resized image would be too large".into()));
    }
    let interp = match p.str("interpolation") {
        "NEAREST" => Interpolation::Nearest,
        _ => Interpolation::Bilinear,
    };
    image(ops::resize(img, fx, fy, interp)?)
}

fn run_sharpen(img: &Arc<Image>, p: &ParamValues) -> Result<StageOutput, OpError> {
    let a = p.real("amount");
    let kernel = Kernel::new(3, vec![0.0, -a, 0.0, -a, 1.0 + 4.0 * a, -a, 0.0, -a, 0.0])?;
    image(ops::convolve(img, &kernel, false))
}

fn run_distance(img: &Arc<Image>, _: &ParamValues) -> Result<StageOutput, OpError> {
    image(ops::distance_transform(img)?.to_display())
}

fn run_draw_contours(img: &Arc<Image>, _: &ParamValues) -> Result<StageOutput, OpError> {
    let set = ops::find_contours(img)?;
    let blank = Image::new(img.width(), img.height(), PixelFormat::Gray8, 0)?;
    Ok(StageOutput {
        image: Arc::new(ops::draw_contours(&blank, &set, &[255])?),
        product: Some(DataProduct::Contours(set)),
    })
}

fn standard_entries() -> Vec<CatalogEntry> {
    use Category as C;
    use InputRequirement as In;
    use OutputFormat as Out;

    let entry = |spec: BlockSpec, run: RunFn| CatalogEntry { spec, run, constraint: None };
    let spec = |id, display_name, category, params: Vec<ParamSpec>, input, output, description, example| BlockSpec {
        id,
        display_name,
        category,
        params,
        input,
        output,
        is_source: input == In::None,
        description,
        example,
    };

    vec![
        entry(
            spec("READ_IMAGE", "Read Image", C::Io, vec![], In::None, Out::Color,
                "Loads the session or command-line source image. Must be the first block.",
                r#"{"id": "src", "op": "READ_IMAGE", "params": {}}"#),
            |src, _| Ok(StageOutput { image: Arc::clone(src), product: None }),
        ),
        entry(
            spec("WRITE_IMAGE", "Write Image", C::Io,
                vec![ParamSpec {
                    name: "path",
                    kind: ParamKind::String { max_len: 4096 },
                    default: Some(json!("output.png")),
                    description: "Destination file (.png or .ppm), written by the command-line runner.",
                }],
                In::AnyImage, Out::PassThrough,
                "Saves the current image and forwards it unchanged.",
                r#"{"id": "save", "op": "WRITE_IMAGE", "params": {"path": "out.png"}}"#),
            |src, _| Ok(StageOutput { image: Arc::clone(src), product: None }),
        ),
        entry(
            spec("RESIZE", "Scale Image", C::Geometric,
                vec![
                    real("fx", 0.0, 8.0, Some(0.5), "Horizontal scale factor."),
                    real("fy", 0.0, 8.0, Some(0.5), "Vertical scale factor."),
                    choice("interpolation", &["NEAREST", "BILINEAR"], "BILINEAR", "Resampling method."),
                ],
                In::AnyImage, Out::PreserveNonBinary,
                "Scales the image by independent horizontal and vertical factors.",
                r#"{"id": "half", "op": "RESIZE", "params": {"fx": 0.5, "fy": 0.5}}"#),
            run_resize,
        ),
        entry(
            spec("ROTATE", "Rotate Image", C::Geometric,
                vec![choice("angle", &["90", "180", "270"], "90", "Clockwise rotation in degrees.")],
                In::AnyImage, Out::Preserve,
                "Rotates clockwise by a right angle.",
                r#"{"id": "rot", "op": "ROTATE", "params": {"angle": "180"}}"#),
            |src, p| {
                let deg = p.str("angle").parse().map_err(|_| OpError::Parameter("angle".into()))?;
                image(ops::rotate(src, Rotation::from_degrees(deg)?))
            },
        ),
        entry(
            spec("FLIP", "Flip Image", C::Geometric,
                vec![choice("axis", &["H", "V"], "H", "H mirrors left-right, V mirrors top-bottom.")],
                In::AnyImage, Out::Preserve,
                "Mirrors the image.",
                r#"{"id": "mirror", "op": "FLIP", "params": {"axis": "H"}}"#),
            |src, p| {
                let axis = if p.str("axis") == "V" { FlipAxis::V } else { FlipAxis::H };
                image(ops::flip(src, axis))
            },
        ),
        entry(
            spec("TO_GRAYSCALE", "Convert to Grayscale", C::Conversion, vec![], In::AnyImage, Out::Gray,
                "Rec. 601 luma: round(0.299 R + 0.587 G + 0.114 B).",
                r#"{"id": "gray", "op": "TO_GRAYSCALE", "params": {}}"#),
            |src, _| image(ops::to_grayscale(src)),
        ),
        entry(
            spec("DRAW_LINE", "Draw Line", C::Drawing,
                [vec![point("from", [0, 0], "Start point [x, y]."), point("to", [10, 10], "End point [x, y].")],
                    drawing_style().to_vec()].concat(),
                In::AnyImage, Out::PreserveNonBinary,
                "Draws a straight line (Bresenham).",
                r#"{"id": "line", "op": "DRAW_LINE", "params": {"from": [0, 0], "to": [31, 31], "color": [255]}}"#),
            |src, p| draw(src, p, Shape::Line { from: p.coords("from"), to: p.coords("to") }),
        ),
        entry(
            spec("DRAW_RECTANGLE", "Draw Rectangle", C::Drawing,
                [vec![point("a", [0, 0], "First corner [x, y]."), point("b", [10, 10], "Opposite corner [x, y].")],
                    drawing_style().to_vec()].concat(),
                In::AnyImage, Out::PreserveNonBinary,
                "Draws a rectangle outline through two opposite corners.",
                r#"{"id": "box", "op": "DRAW_RECTANGLE", "params": {"a": [2, 2], "b": [20, 12]}}"#),
            |src, p| draw(src, p, Shape::Rect { a: p.coords("a"), b: p.coords("b") }),
        ),
        entry(
            spec("DRAW_CIRCLE", "Draw Circle", C::Drawing,
                [vec![point("center", [10, 10], "Center [x, y]."), int("radius", 0, COORD_LIMIT, 5, "Radius in pixels.")],
                    drawing_style().to_vec()].concat(),
                In::AnyImage, Out::PreserveNonBinary,
                "Draws a circle outline (midpoint algorithm).",
                r#"{"id": "ring", "op": "DRAW_CIRCLE", "params": {"center": [16, 16], "radius": 8}}"#),
            |src, p| draw(src, p, Shape::Circle { center: p.coords("center"), radius: p.int("radius") }),
        ),
        entry(
            spec("BOX_BLUR", "Box Blur", C::Blur, vec![odd_kernel(3)], In::AnyImage, Out::PreserveNonBinary,
                "Mean over a k x k window.",
                r#"{"id": "blur", "op": "BOX_BLUR", "params": {"k": 3}}"#),
            |src, p| image(ops::box_blur(src, p.int("k") as usize)?),
        ),
        entry(
            spec("GAUSSIAN_BLUR", "Gaussian Blur", C::Blur,
                vec![odd_kernel(5), real("sigma", 0.0, 100.0, None,
                    "Standard deviation; derived from k when omitted.")],
                In::AnyImage, Out::PreserveNonBinary,
                "Separable Gaussian smoothing.",
                r#"{"id": "smooth", "op": "GAUSSIAN_BLUR", "params": {"k": 5, "sigma": 1.2}}"#),
            |src, p| image(ops::gaussian_blur(src, p.int("k") as usize, p.opt_real("sigma"))?),
        ),
        entry(
            spec("MEDIAN_BLUR", "Median Blur", C::Blur, vec![odd_kernel(3)], In::AnyImage, Out::Preserve,
                "Per-channel median over a k x k window.",
                r#"{"id": "denoise", "op": "MEDIAN_BLUR", "params": {"k": 5}}"#),
            |src, p| image(ops::median_blur(src, p.int("k") as usize)?),
        ),
        entry(
            spec("SHARPEN", "Sharpen", C::Filter,
                vec![ParamSpec {
                    name: "amount",
                    kind: ParamKind::Real { min: 0.0, max: 10.0, min_exclusive: false },
                    default: Some(json!(1.0)),
                    description: "Weight of the subtracted 4-neighbour Laplacian.",
                }],
                In::AnyImage, Out::PreserveNonBinary,
                "3 x 3 sharpening filter [[0,-a,0],[-a,1+4a,-a],[0,-a,0]].",
                r#"{"id": "crisp", "op": "SHARPEN", "params": {"amount": 1.0}}"#),
            run_sharpen,
        ),
        entry(
            spec("THRESHOLD", "Binary Threshold", C::Threshold,
                vec![
                    int("threshold", 0, 255, 128, "Samples strictly above this become maxval."),
                    int("maxval", 1, 255, 255, "Foreground value."),
                ],
                In::Gray, Out::Binary,
                "maxval where sample > threshold, else 0.",
                r#"{"id": "bin", "op": "THRESHOLD", "params": {"threshold": 128}}"#),
            |src, p| image(ops::threshold_binary(src, p.int("threshold") as u8, p.int("maxval") as u8)?),
        ),
        entry(
            spec("OTSU", "Otsu Threshold", C::Threshold, vec![], In::Gray, Out::Binary,
                "Binarizes at the level maximizing between-class variance.",
                r#"{"id": "auto", "op": "OTSU", "params": {}}"#),
            |src, _| image(ops::otsu_threshold(src)?.1),
        ),
        CatalogEntry {
            spec: spec("SOBEL", "Sobel Derivative", C::Derivative,
                vec![int("dx", 0, 1, 1, "Horizontal derivative order."), int("dy", 0, 1, 0, "Vertical derivative order.")],
                In::Gray, Out::Gray,
                "Gradient magnitude of the 3 x 3 Sobel derivatives, clamped to [0, 255].",
                r#"{"id": "grad", "op": "SOBEL", "params": {"dx": 1, "dy": 1}}"#),
            run: |src, p| image(ops::sobel(src, p.int("dx") as u8, p.int("dy") as u8)?.to_display()),
            constraint: Some(|p| {
                if p.int("dx") + p.int("dy") == 0 {
                    return Err("at least one of 'dx' and 'dy' must be 1".into());
                }
                Ok(())
            }),
        },
        CatalogEntry {
            spec: spec("CANNY", "Canny Edges", C::Edge,
                vec![
                    inclusive(real("low", 0.0, 2000.0, Some(50.0), "Weak-edge gradient threshold.")),
                    inclusive(real("high", 0.0, 2000.0, Some(150.0), "Strong-edge gradient threshold.")),
                ],
                In::Gray, Out::Binary,
                "Canny edge map with hysteresis thresholds.",
                r#"{"id": "edges", "op": "CANNY", "params": {"low": 50, "high": 150}}"#),
            run: |src, p| image(ops::canny(src, p.real("low"), p.real("high"))?),
            constraint: Some(|p| {
                if p.real("low") > p.real("high") {
                    return Err("'low' must not exceed 'high'".into());
                }
                Ok(())
            }),
        },
        entry(
            spec("DILATE", "Dilate", C::Morphology, vec![odd_kernel(3)], In::AnyImage, Out::Preserve,
                "Maximum over a k x k square.",
                r#"{"id": "grow", "op": "DILATE", "params": {"k": 3}}"#),
            |src, p| image(ops::dilate(src, p.int("k") as usize)?),
        ),
        entry(
            spec("ERODE", "Erode", C::Morphology, vec![odd_kernel(3)], In::AnyImage, Out::Preserve,
                "Minimum over a k x k square.",
                r#"{"id": "shrink", "op": "ERODE", "params": {"k": 3}}"#),
            |src, p| image(ops::erode(src, p.int("k") as usize)?),
        ),
        entry(
            spec("LAPLACIAN", "Laplacian", C::Segmentation, vec![], In::Gray, Out::Gray,
                "Absolute 4-neighbour Laplacian, clamped to [0, 255].",
                r#"{"id": "lap", "op": "LAPLACIAN", "params": {}}"#),
            |src, _| image(ops::laplacian(src)?),
        ),
        entry(
            spec("DISTANCE_TRANSFORM", "Distance Transform", C::Segmentation, vec![], In::Binary, Out::Gray,
                "City-block distance to the nearest zero pixel, clamped to [0, 255].",
                r#"{"id": "dist", "op": "DISTANCE_TRANSFORM", "params": {}}"#),
            run_distance,
        ),
        entry(
            spec("FIND_CONTOURS", "Find Contours", C::Contour, vec![], In::Binary, Out::PassThrough,
                "Traces the outer boundary of each 8-connected component and forwards the image.",
                r#"{"id": "outline", "op": "FIND_CONTOURS", "params": {}}"#),
            |src, _| Ok(StageOutput {
                image: Arc::clone(src),
                product: Some(DataProduct::Contours(ops::find_contours(src)?)),
            }),
        ),
        entry(
            spec("DRAW_CONTOURS", "Draw Contours", C::Contour, vec![], In::Binary, Out::Binary,
                "Renders the outer boundaries of the input's components on a black canvas.",
                r#"{"id": "trace", "op": "DRAW_CONTOURS", "params": {}}"#),
            run_draw_contours,
        ),
        entry(
            spec("HISTOGRAM", "Histogram", C::Histogram, vec![], In::AnyImage, Out::PassThrough,
                "Records 256-bin counts per channel and forwards the image.",
                r#"{"id": "hist", "op": "HISTOGRAM", "params": {}}"#),
            |src, _| Ok(StageOutput {
                image: Arc::clone(src),
                product: Some(DataProduct::Histogram(ops::histogram(src))),
            }),
        ),
        entry(
            spec("EQUALIZE", "Equalize Histogram", C::Histogram, vec![], In::Gray, Out::Gray,
                "Spreads intensities through the cumulative histogram.",
                r#"{"id": "eq", "op": "EQUALIZE", "params": {}}"#),
            |src, _| image(ops::equalize_histogram(src)?),
        ),
    ]
}
