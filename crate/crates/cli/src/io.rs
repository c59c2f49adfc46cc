//! File formats: binary PGM (8/16-bit, big-endian), background masks, and
//! little-endian `f32` raw fields with a JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use cure_core::Image;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Pgm {
    pub image: Image,
    pub maxval: u16,
}

fn next_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}

pub fn parse_pgm(bytes: &[u8], path: &Path) -> CliResult<Pgm> {
    let bad = |reason: &str| CliError::format(path, reason.to_string());
    let mut pos = 0;
    if next_token(bytes, &mut pos) != Some(b"P5".as_slice()) {
        return Err(bad("not a binary PGM (P5)"));
    }
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        let tok = next_token(bytes, &mut pos).ok_or_else(|| bad("truncated header"))?;
        *slot = std::str::from_utf8(tok)
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("malformed header field"))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(bad("invalid dimensions or maxval"));
    }
    pos += 1;
    let bpp = if maxval < 256 { 1 } else { 2 };
    let need = width * height * bpp;
    let raw = bytes
        .get(pos..pos + need)
        .ok_or_else(|| bad("pixel data shorter than header declares"))?;
    let data = if bpp == 1 {
        raw.iter().map(|&b| b as f64).collect()
    } else {
        raw.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    Ok(Pgm {
        image: Image::new(width, height, data)?,
        maxval: maxval as u16,
    })
}

pub fn read_pgm(path: &Path) -> CliResult<Pgm> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_pgm(&bytes, path)
}

/// 16-bit P5 with values rounded and clamped to `0..=65535`.
pub fn encode_pgm16(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n65535\n", img.width(), img.height()).into_bytes();
    for &v in img.data() {
        let q = if v.is_finite() { v.round().clamp(0.0, 65535.0) as u16 } else { 0 };
        out.extend_from_slice(&q.to_be_bytes());
    }
    out
}

/// Background mask: nonzero pixels are background.
pub fn read_mask(path: &Path) -> CliResult<(usize, usize, Vec<bool>)> {
    let pgm = read_pgm(path)?;
    let mask = pgm.image.data().iter().map(|&v| v != 0.0).collect();
    Ok((pgm.image.width(), pgm.image.height(), mask))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub width: usize,
    pub height: usize,
    pub semantics: String,
}

pub fn sidecar_path(raw: &Path) -> PathBuf {
    raw.with_extension("json")
}

pub fn write_raw(path: &Path, img: &Image, semantics: &str) -> CliResult<()> {
    let mut bytes = Vec::with_capacity(img.len() * 4);
    for &v in img.data() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))?;
    let meta = Sidecar {
        width: img.width(),
        height: img.height(),
        semantics: semantics.to_string(),
    };
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&meta).expect("sidecar serializes");
    fs::write(&side, json).map_err(|e| CliError::io(side, e))
}

pub fn read_raw(path: &Path) -> CliResult<(Image, Sidecar)> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| CliError::io(&side, e))?;
    let meta: Sidecar = serde_json::from_str(&text).map_err(|e| CliError::format(&side, e.to_string()))?;
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.len() != meta.width * meta.height * 4 {
        return Err(CliError::format(
            path,
            format!("expected {} bytes for {}x{} f32", meta.width * meta.height * 4, meta.width, meta.height),
        ));
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Ok((Image::new(meta.width, meta.height, data)?, meta))
}

fn is_raw(path: &Path) -> bool {
    matches!(path.extension().and_then(|e| e.to_str()), Some("raw" | "f32"))
}

/// Reads a PGM, or a raw field when the extension is `.raw`/`.f32`.
pub fn read_image(path: &Path) -> CliResult<Image> {
    if is_raw(path) {
        Ok(read_raw(path)?.0)
    } else {
        Ok(read_pgm(path)?.image)
    }
}

pub fn write_image(path: &Path, img: &Image, semantics: &str) -> CliResult<()> {
    if is_raw(path) {
        write_raw(path, img, semantics)
    } else {
        fs::write(path, encode_pgm16(img)).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm16_round_trip() {
        let img = Image::new(3, 2, vec![0.0, 1.4, 300.0, 65535.0, 70000.0, -3.0]).unwrap();
        let bytes = encode_pgm16(&img);
        let back = parse_pgm(&bytes, Path::new("mem")).unwrap();
        assert_eq!(back.maxval, 65535);
        assert_eq!(back.image.data(), &[0.0, 1.0, 300.0, 65535.0, 65535.0, 0.0]);
    }

    #[test]
    fn pgm8_with_comment() {
        let mut bytes = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 0]);
        let pgm = parse_pgm(&bytes, Path::new("mem")).unwrap();
        assert_eq!(pgm.image.data(), &[7.0, 0.0]);
    }

    #[test]
    fn rejects_truncated() {
        let bytes = b"P5\n4 4\n255\n\x01\x02".to_vec();
        assert!(parse_pgm(&bytes, Path::new("mem")).is_err());
        assert!(parse_pgm(b"P2\n1 1\n255\n1", Path::new("mem")).is_err());
    }
}
