//! PNG reader/writer for 8-bit gray, truecolor and indexed images.
//!
//! The container (chunks, CRCs, filtering, Adam7) is handled here; only the
//! zlib stream goes through `flate2`. Alpha, from an alpha channel or a
//! `tRNS` chunk, is composited over white because [`Image`] has no alpha.

use std::io::{Read, Write};

use flate2::read::ZlibDecoder;
use flate2::write::ZlibEncoder;
use flate2::Compression;

use super::{Image, PixelFormat, RasterError};

pub const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// Decoded-size ceiling; larger images are refused before inflating.
const MAX_RAW_BYTES: usize = 1 << 30;

fn decode_err(offset: usize, message: impl Into<String>) -> RasterError {
    RasterError::Decode {
        offset,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy)]
struct Header {
    width: usize,
    height: usize,
    color_type: u8,
    interlaced: bool,
}

impl Header {
    fn samples_per_pixel(&self) -> usize {
        match self.color_type {
            0 | 3 => 1,
            4 => 2,
            2 => 3,
            6 => 4,
            _ => unreachable!("validated in IHDR"),
        }
    }
}

enum Transparency {
    None,
    Palette(Vec<u8>),
    GrayKey(u16),
    RgbKey([u16; 3]),
}

fn be_u32(b: &[u8]) -> u32 {
    u32::from_be_bytes([b[0], b[1], b[2], b[3]])
}

pub fn decode_png(bytes: &[u8]) -> Result<Image, RasterError> {
    if bytes.len() < 8 || bytes[..8] != PNG_SIGNATURE {
        return Err(decode_err(0, "missing PNG signature"));
    }
    let mut pos = 8;
    let mut header: Option<Header> = None;
    let mut palette: Option<Vec<[u8; 3]>> = None;
    let mut trns: Option<(usize, Vec<u8>)> = None;
    let mut idat = Vec::new();
    let mut seen_end = false;

    while pos < bytes.len() {
        if bytes.len() - pos < 12 {
            return Err(decode_err(pos, "truncated chunk header"));
        }
        let len = be_u32(&bytes[pos..]) as usize;
        let kind: [u8; 4] = bytes[pos + 4..pos + 8].try_into().unwrap();
        if len > 0x7FFF_FFFF || bytes.len() - pos - 12 < len {
            return Err(decode_err(pos, "chunk extends past end of stream"));
        }
        let body = &bytes[pos + 8..pos + 8 + len];
        let stored_crc = be_u32(&bytes[pos + 8 + len..]);
        let mut hasher = crc32fast::Hasher::new();
        hasher.update(&kind);
        hasher.update(body);
        if hasher.finalize() != stored_crc {
            return Err(decode_err(pos, "chunk CRC mismatch"));
        }
        if header.is_none() && &kind != b"IHDR" {
            return Err(decode_err(pos, "first chunk is not IHDR"));
        }
        match &kind {
            b"IHDR" => {
                if header.is_some() {
                    return Err(decode_err(pos, "duplicate IHDR"));
                }
                header = Some(parse_ihdr(body, pos)?);
            }
            b"PLTE" => {
                if !len.is_multiple_of(3) || len == 0 || len > 256 * 3 {
                    return Err(decode_err(pos, "invalid PLTE length"));
                }
                palette = Some(body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect());
            }
            b"tRNS" => trns = Some((pos, body.to_vec())),
            b"IDAT" => idat.extend_from_slice(body),
            b"IEND" => {
                seen_end = true;
                break;
            }
            _ => {
                // Ancillary chunks are skipped; unknown critical ones are not.
                if kind[0] & 0x20 == 0 {
                    return Err(RasterError::Unsupported(format!(
                        "critical chunk {}",
                        String::from_utf8_lossy(&kind)
                    )));
                }
            }
        }
        pos += 12 + len;
    }
    if !seen_end {
        return Err(decode_err(bytes.len(), "missing IEND"));
    }
    let header = header.ok_or_else(|| decode_err(8, "missing IHDR"))?;
    if idat.is_empty() {
        return Err(decode_err(bytes.len(), "no IDAT data"));
    }
    let palette = match (header.color_type, palette) {
        (3, None) => return Err(decode_err(bytes.len(), "indexed image without PLTE")),
        (_, p) => p,
    };
    let transparency = match trns {
        None => Transparency::None,
        Some((at, t)) => match header.color_type {
            3 => Transparency::Palette(t),
            0 if t.len() == 2 => Transparency::GrayKey(u16::from_be_bytes([t[0], t[1]])),
            2 if t.len() == 6 => Transparency::RgbKey([
                u16::from_be_bytes([t[0], t[1]]),
                u16::from_be_bytes([t[2], t[3]]),
                u16::from_be_bytes([t[4], t[5]]),
            ]),
            _ => return Err(decode_err(at, "invalid tRNS chunk")),
        },
    };

    let spp = header.samples_per_pixel();
    let raw = inflate(&idat, &header, spp, bytes.len())?;
    let samples = if header.interlaced {
        deinterlace(&raw, &header, spp, bytes.len())?
    } else {
        unfilter(&raw, header.width, header.height, spp, bytes.len())?
    };
    to_image(&samples, &header, palette.as_deref(), &transparency, bytes.len())
}

fn parse_ihdr(body: &[u8], pos: usize) -> Result<Header, RasterError> {
    if body.len() != 13 {
        return Err(decode_err(pos, "IHDR must be 13 bytes"));
    }
    let width = be_u32(&body[0..]) as usize;
    let height = be_u32(&body[4..]) as usize;
    let depth = body[8];
    let color_type = body[9];
    if width == 0 || height == 0 {
        return Err(decode_err(pos, "zero image dimension"));
    }
    if !matches!(color_type, 0 | 2 | 3 | 4 | 6) {
        return Err(decode_err(pos, format!("invalid color type {color_type}")));
    }
    if depth != 8 {
        return Err(RasterError::Unsupported(format!("bit depth {depth}")));
    }
    if body[10] != 0 || body[11] != 0 {
        return Err(decode_err(pos, "unknown compression or filter method"));
    }
    if body[12] > 1 {
        return Err(decode_err(pos, "unknown interlace method"));
    }
    Ok(Header {
        width,
        height,
        color_type,
        interlaced: body[12] == 1,
    })
}

fn inflate(idat: &[u8], h: &Header, spp: usize, end: usize) -> Result<Vec<u8>, RasterError> {
    let expected = if h.interlaced {
        adam7_passes(h.width, h.height)
            .iter()
            .filter(|p| p.w > 0 && p.h > 0)
            .map(|p| p.h * (p.w * spp + 1))
            .sum::<usize>()
    } else {
        h.height.saturating_mul(h.width.checked_mul(spp).and_then(|r| r.checked_add(1)).unwrap_or(usize::MAX))
    };
    if expected > MAX_RAW_BYTES {
        return Err(RasterError::Unsupported(format!(
            "image {}x{} too large",
            h.width, h.height
        )));
    }
    let mut raw = Vec::with_capacity(expected);
    ZlibDecoder::new(idat)
        .take(expected as u64)
        .read_to_end(&mut raw)
        .map_err(|e| decode_err(end, format!("zlib stream: {e}")))?;
    if raw.len() < expected {
        return Err(decode_err(end, "image data shorter than declared size"));
    }
    Ok(raw)
}

fn paeth(a: u8, b: u8, c: u8) -> u8 {
    let p = i16::from(a) + i16::from(b) - i16::from(c);
    let pa = (p - i16::from(a)).abs();
    let pb = (p - i16::from(b)).abs();
    let pc = (p - i16::from(c)).abs();
    if pa <= pb && pa <= pc {
        a
    } else if pb <= pc {
        b
    } else {
        c
    }
}

/// Reverses per-row filtering of one (sub)image; `raw` starts with the
/// first row's filter byte.
fn unfilter(
    raw: &[u8],
    width: usize,
    height: usize,
    bpp: usize,
    end: usize,
) -> Result<Vec<u8>, RasterError> {
    let stride = width * bpp;
    let mut out = vec![0u8; stride * height];
    for y in 0..height {
        let src = &raw[y * (stride + 1)..(y + 1) * (stride + 1)];
        let filter = src[0];
        let (prev_rows, cur_rows) = out.split_at_mut(y * stride);
        let prev = if y == 0 {
            None
        } else {
            Some(&prev_rows[(y - 1) * stride..])
        };
        let cur = &mut cur_rows[..stride];
        for i in 0..stride {
            let x = src[1 + i];
            let a = if i >= bpp { cur[i - bpp] } else { 0 };
            let b = prev.map_or(0, |p| p[i]);
            let c = if i >= bpp { prev.map_or(0, |p| p[i - bpp]) } else { 0 };
            cur[i] = match filter {
                0 => x,
                1 => x.wrapping_add(a),
                2 => x.wrapping_add(b),
                3 => x.wrapping_add(((u16::from(a) + u16::from(b)) / 2) as u8),
                4 => x.wrapping_add(paeth(a, b, c)),
                f => return Err(decode_err(end, format!("invalid filter type {f}"))),
            };
        }
    }
    Ok(out)
}

struct Pass {
    x0: usize,
    y0: usize,
    dx: usize,
    dy: usize,
    w: usize,
    h: usize,
}

fn adam7_passes(width: usize, height: usize) -> Vec<Pass> {
    const P: [(usize, usize, usize, usize); 7] = [
        (0, 0, 8, 8),
        (4, 0, 8, 8),
        (0, 4, 4, 8),
        (2, 0, 4, 4),
        (0, 2, 2, 4),
        (1, 0, 2, 2),
        (0, 1, 1, 2),
    ];
    P.iter()
        .map(|&(x0, y0, dx, dy)| Pass {
            x0,
            y0,
            dx,
            dy,
            w: (width + dx - 1 - x0) / dx,
            h: (height + dy - 1 - y0) / dy,
        })
        .collect()
}

fn deinterlace(
    raw: &[u8],
    h: &Header,
    spp: usize,
    end: usize,
) -> Result<Vec<u8>, RasterError> {
    let mut out = vec![0u8; h.width * h.height * spp];
    let mut offset = 0;
    for pass in adam7_passes(h.width, h.height) {
        if pass.w == 0 || pass.h == 0 {
            continue;
        }
        let len = pass.h * (pass.w * spp + 1);
        let sub = unfilter(&raw[offset..offset + len], pass.w, pass.h, spp, end)?;
        offset += len;
        for py in 0..pass.h {
            for px in 0..pass.w {
                let x = pass.x0 + px * pass.dx;
                let y = pass.y0 + py * pass.dy;
                let s = (py * pass.w + px) * spp;
                let d = (y * h.width + x) * spp;
                out[d..d + spp].copy_from_slice(&sub[s..s + spp]);
            }
        }
    }
    Ok(out)
}

/// `v` blended over white with opacity `a`, rounded half up.
#[inline]
fn over_white(v: u8, a: u8) -> u8 {
    let blended = u32::from(v) * u32::from(a) + 255 * (255 - u32::from(a));
    ((2 * blended + 255) / 510) as u8
}

fn to_image(
    samples: &[u8],
    h: &Header,
    palette: Option<&[[u8; 3]]>,
    trns: &Transparency,
    end: usize,
) -> Result<Image, RasterError> {
    let n = h.width * h.height;
    let (format, data) = match h.color_type {
        0 => {
            let data = match trns {
                Transparency::GrayKey(k) => samples
                    .iter()
                    .map(|&v| if u16::from(v) == *k { 255 } else { v })
                    .collect(),
                _ => samples.to_vec(),
            };
            (PixelFormat::Gray8, data)
        }
        4 => (
            PixelFormat::Gray8,
            samples.chunks_exact(2).map(|p| over_white(p[0], p[1])).collect(),
        ),
        2 => {
            let data = match trns {
                Transparency::RgbKey(k) => samples
                    .chunks_exact(3)
                    .flat_map(|p| {
                        if k.iter().zip(p).all(|(&k, &v)| k == u16::from(v)) {
                            [255, 255, 255]
                        } else {
                            [p[0], p[1], p[2]]
                        }
                    })
                    .collect(),
                _ => samples.to_vec(),
            };
            (PixelFormat::Rgb8, data)
        }
        6 => (
            PixelFormat::Rgb8,
            samples
                .chunks_exact(4)
                .flat_map(|p| [over_white(p[0], p[3]), over_white(p[1], p[3]), over_white(p[2], p[3])])
                .collect(),
        ),
        3 => {
            let palette = palette.expect("checked before inflate");
            let alpha: &[u8] = match trns {
                Transparency::Palette(a) => a,
                _ => &[],
            };
            let mut data = Vec::with_capacity(n * 3);
            for &idx in samples {
                let idx = usize::from(idx);
                let rgb = palette
                    .get(idx)
                    .ok_or_else(|| decode_err(end, format!("palette index {idx} out of range")))?;
                let a = alpha.get(idx).copied().unwrap_or(255);
                data.extend(rgb.iter().map(|&v| over_white(v, a)));
            }
            (PixelFormat::Rgb8, data)
        }
        _ => unreachable!(),
    };
    Image::from_raw(h.width, h.height, format, data)
}

fn write_chunk(out: &mut Vec<u8>, kind: &[u8; 4], body: &[u8]) {
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(kind);
    out.extend_from_slice(body);
    let mut hasher = crc32fast::Hasher::new();
    hasher.update(kind);
    hasher.update(body);
    out.extend_from_slice(&hasher.finalize().to_be_bytes());
}

/// Encodes as color type 0 (GRAY8) or 2 (RGB8), bit depth 8, no interlace.
/// Output is deterministic for a given image.
pub fn encode_png(img: &Image) -> Vec<u8> {
    let color_type = match img.format() {
        PixelFormat::Gray8 => 0u8,
        PixelFormat::Rgb8 => 2u8,
    };
    let mut ihdr = Vec::with_capacity(13);
    ihdr.extend_from_slice(&(img.width() as u32).to_be_bytes());
    ihdr.extend_from_slice(&(img.height() as u32).to_be_bytes());
    ihdr.extend_from_slice(&[8, color_type, 0, 0, 0]);

    let stride = img.width() * img.channels();
    let mut filtered = Vec::with_capacity((stride + 1) * img.height());
    for row in img.as_bytes().chunks_exact(stride) {
        filtered.push(0);
        filtered.extend_from_slice(row);
    }
    let mut enc = ZlibEncoder::new(Vec::new(), Compression::default());
    enc.write_all(&filtered).expect("writing to a Vec cannot fail");
    let compressed = enc.finish().expect("writing to a Vec cannot fail");

    let mut out = Vec::with_capacity(compressed.len() + 64);
    out.extend_from_slice(&PNG_SIGNATURE);
    write_chunk(&mut out, b"IHDR", &ihdr);
    write_chunk(&mut out, b"IDAT", &compressed);
    write_chunk(&mut out, b"IEND", &[]);
    out
}
