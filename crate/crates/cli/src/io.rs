use std::fs;
use std::path::Path;

use imagelab_core::raster::{decode_png, decode_ppm, encode_png, encode_ppm, PNG_SIGNATURE};
use imagelab_core::Image;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Ppm,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Result<Self, Failure> {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("png") => Ok(Self::Png),
            Some("ppm" | "pgm" | "pnm") => Ok(Self::Ppm),
            _ => Err(Failure::usage(format!(
                "{}: unsupported output extension (use .png or .ppm)",
                path.display()
            ))),
        }
    }
}

/// Reads a PNG or binary PPM/PGM, detected from the file contents.
pub fn read_image(path: &Path) -> Result<Image, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
    let decoded = if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(&bytes)
    } else {
        decode_ppm(&bytes)
    };
    decoded.map_err(|e| Failure::io(path, e))
}

pub fn write_image(path: &Path, img: &Image) -> Result<(), Failure> {
    let bytes = match ImageFormat::from_path(path)? {
        ImageFormat::Png => encode_png(img),
        ImageFormat::Ppm => encode_ppm(img),
    };
    write(path, &bytes)
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}
