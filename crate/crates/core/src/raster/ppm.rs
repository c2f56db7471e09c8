//! Binary PNM (`P5` gray, `P6` color) with maxval 255.

use super::{Image, PixelFormat, RasterError};

fn decode_err(offset: usize, message: impl Into<String>) -> RasterError {
    RasterError::Decode {
        offset,
        message: message.into(),
    }
}

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, RasterError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(decode_err(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| decode_err(start, format!("{what} out of range")))
    }
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Image, RasterError> {
    let format = match bytes.get(..2) {
        Some(b"P5") => PixelFormat::Gray8,
        Some(b"P6") => PixelFormat::Rgb8,
        _ => return Err(decode_err(0, "expected P5 or P6 magic")),
    };
    let mut r = HeaderReader { bytes, pos: 2 };
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval_at = r.pos;
    let maxval = r.number("maxval")?;
    if maxval != 255 {
        return Err(decode_err(maxval_at, format!("maxval {maxval}, only 255 supported")));
    }
    // Exactly one whitespace byte separates the header from the body.
    match bytes.get(r.pos) {
        Some(b) if b.is_ascii_whitespace() => r.pos += 1,
        _ => return Err(decode_err(r.pos, "missing whitespace after maxval")),
    }
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidDimension { width, height });
    }
    let len = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(format.channels()))
        .ok_or_else(|| decode_err(2, "dimensions overflow"))?;
    let body = &bytes[r.pos..];
    if body.len() < len {
        return Err(decode_err(bytes.len(), "short pixel body"));
    }
    Image::from_raw(width, height, format, body[..len].to_vec())
}

pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let magic = match img.format() {
        PixelFormat::Gray8 => "P5",
        PixelFormat::Rgb8 => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.as_bytes());
    out
}
