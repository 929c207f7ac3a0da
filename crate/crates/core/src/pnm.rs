//! Binary PGM (P5) and PPM (P6) encoding, maxval 255.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Mask;

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

pub fn encode_ppm(width: usize, height: usize, pixels: &[[u8; 3]]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.reserve(pixels.len() * 3);
    for px in pixels {
        out.extend_from_slice(px);
    }
    out
}

/// A decoded greyscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// Decodes a binary P5 image. Comments (`#` to end of line) are allowed in the header.
pub fn decode_pgm(data: &[u8]) -> Result<Gray> {
    let mut pos = 0usize;
    let magic = next_token(data, &mut pos)?;
    if magic != b"P5" {
        return Err(Error::Image("not a binary PGM (expected P5)".into()));
    }
    let width = parse_uint(next_token(data, &mut pos)?)?;
    let height = parse_uint(next_token(data, &mut pos)?)?;
    let maxval = parse_uint(next_token(data, &mut pos)?)?;
    if maxval != 255 {
        return Err(Error::Image(format!("unsupported PGM maxval {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(Error::Image("truncated PGM header".into()));
    }
    pos += 1;
    let expected = width * height;
    let raster = &data[pos..];
    if raster.len() < expected {
        return Err(Error::Image(format!(
            "PGM raster has {} bytes, expected {}",
            raster.len(),
            expected
        )));
    }
    Ok(Gray {
        width,
        height,
        pixels: raster[..expected].to_vec(),
    })
}

fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Image("truncated PGM header".into()));
    }
    Ok(&data[start..*pos])
}

fn parse_uint(tok: &[u8]) -> Result<usize> {
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| {
            Error::Image(format!(
                "bad PGM header field {:?}",
                String::from_utf8_lossy(tok)
            ))
        })
}

/// Masks are stored as 0 (unset) / 255 (set).
pub fn mask_to_pgm(mask: &Mask) -> Vec<u8> {
    let px: Vec<u8> = mask
        .as_slice()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    encode_pgm(mask.width(), mask.height(), &px)
}

/// Inverse of [`mask_to_pgm`]. Any value other than 0 or 255 is rejected.
pub fn mask_from_pgm(data: &[u8]) -> Result<Mask> {
    let img = decode_pgm(data)?;
    let mut bits = Vec::with_capacity(img.pixels.len());
    for (i, &p) in img.pixels.iter().enumerate() {
        match p {
            0 => bits.push(false),
            255 => bits.push(true),
            other => {
                return Err(Error::Image(format!(
                    "mask pixel {} has value {other}, expected 0 or 255",
                    i
                )))
            }
        }
    }
    Mask::from_vec(img.width, img.height, bits)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_header_layout() {
        let bytes = encode_pgm(2, 1, &[0, 255]);
        assert_eq!(&bytes[..], b"P5\n2 1\n255\n\x00\xff");
    }

    #[test]
    fn decode_skips_comments() {
        let data = b"P5\n# made by hand\n2 1\n255\n\x07\x09";
        let img = decode_pgm(data).unwrap();
        assert_eq!((img.width, img.height), (2, 1));
        assert_eq!(img.pixels, vec![7, 9]);
    }

    #[test]
    fn decode_rejects_short_raster() {
        assert!(decode_pgm(b"P5 3 3 255\n\x00").is_err());
        assert!(decode_pgm(b"P6 1 1 255\n\x00\x00\x00").is_err());
    }

    #[test]
    fn mask_rejects_grey_values() {
        let bytes = encode_pgm(2, 1, &[0, 128]);
        assert!(mask_from_pgm(&bytes).is_err());
    }

    #[test]
    fn mask_roundtrip() {
        let mask = Mask::from_fn(5, 3, |m, n| (m + n) % 2 == 0);
        assert_eq!(mask_from_pgm(&mask_to_pgm(&mask)).unwrap(), mask);
    }
}
