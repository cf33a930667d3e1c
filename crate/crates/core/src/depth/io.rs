//! Depth-map file formats: single-channel PFM and 16-bit grayscale PNG.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::InverseDepthMap;

/// Reads a single-channel PFM file.
///
/// Only the grayscale `Pf` variant is accepted; the scale's sign selects
/// the endianness and its magnitude is ignored. Rows are stored bottom-up
/// in the file and normalized to top-down here. Non-finite samples are
/// marked invalid.
pub fn read_pfm(path: impl AsRef<Path>) -> Result<InverseDepthMap> {
    let mut reader = BufReader::new(File::open(path.as_ref())?);
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    parse_pfm(&data)
}

fn parse_pfm(data: &[u8]) -> Result<InverseDepthMap> {
    let mut pos = 0usize;
    let mut token = |data: &[u8]| -> Result<String> {
        while pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::FormatError("pfm header ended early".into()));
        }
        // consume the single whitespace terminating the token
        if pos < data.len() {
            pos += 1;
        }
        Ok(String::from_utf8_lossy(&data[start..pos - 1]).into_owned())
    };

    let magic = token(data)?;
    match magic.as_str() {
        "Pf" => {}
        "PF" => {
            return Err(Error::FormatError(
                "3-channel PF files are not supported, expected grayscale Pf".into(),
            ))
        }
        other => {
            return Err(Error::FormatError(format!(
                "not a pfm file (magic {other:?})"
            )))
        }
    }
    let width: usize = token(data)?
        .parse()
        .map_err(|_| Error::FormatError("bad pfm width".into()))?;
    let height: usize = token(data)?
        .parse()
        .map_err(|_| Error::FormatError("bad pfm height".into()))?;
    let scale: f64 = token(data)?
        .parse()
        .map_err(|_| Error::FormatError("bad pfm scale".into()))?;
    if width == 0 || height == 0 {
        return Err(Error::FormatError("pfm dimensions must be nonzero".into()));
    }
    if scale == 0.0 {
        return Err(Error::FormatError("pfm scale must be nonzero".into()));
    }
    let little_endian = scale < 0.0;

    let payload = &data[pos..];
    let need = width * height * 4;
    if payload.len() < need {
        return Err(Error::FormatError(format!(
            "pfm payload truncated: {} bytes, expected {}",
            payload.len(),
            need
        )));
    }

    // file rows run bottom-up
    let mut values = vec![0.0f64; width * height];
    let mut valid = vec![true; width * height];
    for file_row in 0..height {
        let img_row = height - 1 - file_row;
        for x in 0..width {
            let off = (file_row * width + x) * 4;
            let bytes: [u8; 4] = payload[off..off + 4].try_into().expect("length checked");
            let v = if little_endian {
                f32::from_le_bytes(bytes)
            } else {
                f32::from_be_bytes(bytes)
            };
            let idx = img_row * width + x;
            values[idx] = v as f64;
            valid[idx] = v.is_finite();
        }
    }
    let mask = if valid.iter().all(|&b| b) {
        None
    } else {
        Some(valid)
    };
    InverseDepthMap::with_mask(width, height, values, mask)
}

/// Writes a map as little-endian grayscale PFM (scale -1.0).
///
/// Values are stored as `f32`; invalid pixels are written as NaN so the
/// validity mask survives a round trip.
pub fn write_pfm(map: &InverseDepthMap, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    write!(w, "Pf\n{} {}\n-1.0\n", map.width(), map.height())?;
    for file_row in 0..map.height() {
        let img_row = map.height() - 1 - file_row;
        for x in 0..map.width() {
            let idx = img_row * map.width() + x;
            let v = if map.is_valid(idx) {
                map.values()[idx] as f32
            } else {
                f32::NAN
            };
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a 16-bit single-channel PNG as inverse depth.
///
/// Raw values map onto `[0, 1]` by `v / 65535`; `invert` flips to `1 - v`
/// for sources that store straight depth. Zero raw samples are the missing
/// -data sentinel and are marked invalid.
pub fn read_depth_png16(path: impl AsRef<Path>, invert: bool) -> Result<InverseDepthMap> {
    let img = image::open(path.as_ref())
        .map_err(|e| Error::FormatError(format!("{}: {e}", path.as_ref().display())))?;
    let gray = match img {
        image::DynamicImage::ImageLuma16(buf) => buf,
        other => {
            return Err(Error::FormatError(format!(
                "{}: expected 16-bit grayscale png, got {:?}",
                path.as_ref().display(),
                other.color()
            )))
        }
    };
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    let mut values = Vec::with_capacity(w * h);
    let mut valid = Vec::with_capacity(w * h);
    let mut any_invalid = false;
    for px in gray.pixels() {
        let raw = px.0[0];
        let mut v = raw as f64 / 65535.0;
        if invert {
            v = 1.0 - v;
        }
        values.push(v);
        valid.push(raw != 0);
        any_invalid |= raw == 0;
    }
    let mask = if any_invalid { Some(valid) } else { None };
    InverseDepthMap::with_mask(w, h, values, mask)
}
