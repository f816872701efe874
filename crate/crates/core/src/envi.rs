//! Minimal ENVI reader/writer.
//!
//! Only the keys needed to locate and decode the samples are interpreted:
//! `samples`, `lines`, `bands`, `data type`, `interleave`, `byte order` and,
//! when present, `wavelength`. Everything else in a header is ignored.
//! Supported data types are 4 (float32), 12 (uint16) and 2 (int16); byte
//! order must be 0 (little-endian). Cubes are always written as float32.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cube::{HsiCube, Interleave};
use crate::error::{Error, Result};

/// Parsed header fields.
#[derive(Debug, Clone, PartialEq)]
pub struct EnviHeader {
    pub samples: usize,
    pub lines: usize,
    pub bands: usize,
    pub data_type: u32,
    pub interleave: Interleave,
    pub byte_order: u32,
    pub wavelengths: Option<Vec<f64>>,
}

impl EnviHeader {
    pub fn bytes_per_sample(&self) -> Result<u64> {
        match self.data_type {
            4 => Ok(4),
            2 | 12 => Ok(2),
            other => Err(Error::UnsupportedDataType(other)),
        }
    }

    pub fn expected_len(&self) -> Result<u64> {
        Ok(self.samples as u64 * self.lines as u64 * self.bands as u64 * self.bytes_per_sample()?)
    }
}

/// Splits header text into lowercase keys and raw values. Brace-delimited
/// values may span several lines.
fn header_fields(text: &str) -> HashMap<String, String> {
    let mut fields = HashMap::new();
    let mut lines = text.lines();
    while let Some(line) = lines.next() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let key = key.trim().to_ascii_lowercase();
        let mut value = value.trim().to_string();
        if value.starts_with('{') {
            while !value.contains('}') {
                match lines.next() {
                    Some(next) => {
                        value.push(' ');
                        value.push_str(next.trim());
                    }
                    None => break,
                }
            }
        }
        fields.insert(key, value);
    }
    fields
}

/// Parses ENVI header text. `path` is only used in error messages.
pub fn parse_header(text: &str, path: &Path) -> Result<EnviHeader> {
    let fields = header_fields(text);
    let bad = |msg: String| Error::Header {
        path: path.to_path_buf(),
        msg,
    };
    let get = |key: &str| fields.get(key).ok_or_else(|| bad(format!("missing key '{key}'")));
    let int = |key: &str| -> Result<u64> {
        let raw = get(key)?;
        raw.trim()
            .parse::<u64>()
            .map_err(|_| bad(format!("key '{key}' has non-integer value '{raw}'")))
    };

    let samples = int("samples")? as usize;
    let lines = int("lines")? as usize;
    let bands = int("bands")? as usize;
    if samples == 0 || lines == 0 || bands == 0 {
        return Err(bad(format!("zero dimension {samples}x{lines}x{bands}")));
    }
    let data_type = int("data type")? as u32;
    let interleave: Interleave = get("interleave")?.parse().map_err(|e: Error| bad(e.to_string()))?;
    let byte_order = int("byte order")? as u32;

    let wavelengths = match fields.get("wavelength") {
        None => None,
        Some(raw) => {
            let inner = raw.trim().trim_start_matches('{').trim_end_matches('}');
            let values = inner
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| bad(format!("bad wavelength '{s}'"))))
                .collect::<Result<Vec<_>>>()?;
            Some(values)
        }
    };

    Ok(EnviHeader {
        samples,
        lines,
        bands,
        data_type,
        interleave,
        byte_order,
        wavelengths,
    })
}

/// Candidate binary files for a header path, in lookup order.
fn data_candidates(header_path: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let s = header_path.to_string_lossy();
    if let Some(stripped) = s.strip_suffix(".hdr").or_else(|| s.strip_suffix(".HDR")) {
        out.push(PathBuf::from(stripped));
    }
    for ext in ["img", "dat", "raw", "bin", "bsq", "bil", "bip"] {
        out.push(header_path.with_extension(ext));
    }
    out
}

/// Header and binary paths used by [`write_envi`] for a user-supplied path.
///
/// `name.hdr` pairs with `name.img`; any other path is the binary itself and
/// gets `<path>.hdr` as its header.
pub fn envi_paths(path: &Path) -> (PathBuf, PathBuf) {
    let is_hdr = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("hdr"))
        .unwrap_or(false);
    if is_hdr {
        (path.to_path_buf(), path.with_extension("img"))
    } else {
        let mut header = path.as_os_str().to_owned();
        header.push(".hdr");
        (PathBuf::from(header), path.to_path_buf())
    }
}

/// Reads a cube from an ENVI header and its companion binary file.
pub fn read_envi(header_path: impl AsRef<Path>) -> Result<HsiCube<f32>> {
    let header_path = header_path.as_ref();
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header = parse_header(&text, header_path)?;
    if header.byte_order != 0 {
        return Err(Error::UnsupportedByteOrder(header.byte_order));
    }
    let width = header.bytes_per_sample()? as usize;

    let data_path = data_candidates(header_path)
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| Error::Header {
            path: header_path.to_path_buf(),
            msg: "companion binary file not found".into(),
        })?;
    let bytes = fs::read(&data_path).map_err(|e| Error::io(&data_path, e))?;
    let expected = header.expected_len()?;
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: bytes.len() as u64,
        });
    }

    let decode: fn(&[u8]) -> f32 = match header.data_type {
        4 => |b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]),
        12 => |b| u16::from_le_bytes([b[0], b[1]]) as f32,
        2 => |b| i16::from_le_bytes([b[0], b[1]]) as f32,
        other => return Err(Error::UnsupportedDataType(other)),
    };

    let (rows, cols, bands) = (header.lines, header.samples, header.bands);
    let mut data = vec![0f32; rows * cols * bands];
    let il = header.interleave;
    for r in 0..rows {
        for c in 0..cols {
            for b in 0..bands {
                let o = il.offset(rows, cols, bands, r, c, b) * width;
                data[(r * cols + c) * bands + b] = decode(&bytes[o..o + width]);
            }
        }
    }

    let cube = HsiCube::new(rows, cols, bands, data)?.with_interleave(il);
    match header.wavelengths {
        Some(w) => cube.with_wavelengths(w),
        None => Ok(cube),
    }
}

/// Renders the header written alongside a float32 cube.
pub fn render_header<T>(cube: &HsiCube<T>, interleave: Interleave) -> String
where
    T: crate::Scalar,
{
    let mut s = String::from("ENVI\n");
    s.push_str("description = {lss-core}\n");
    s.push_str(&format!("samples = {}\n", cube.cols()));
    s.push_str(&format!("lines = {}\n", cube.rows()));
    s.push_str(&format!("bands = {}\n", cube.bands()));
    s.push_str("header offset = 0\n");
    s.push_str("file type = ENVI Standard\n");
    s.push_str("data type = 4\n");
    s.push_str(&format!("interleave = {interleave}\n"));
    s.push_str("byte order = 0\n");
    if let Some(w) = cube.wavelengths() {
        let list: Vec<String> = w.iter().map(|v| format!("{v}")).collect();
        s.push_str(&format!("wavelength units = nm\nwavelength = {{{}}}\n", list.join(", ")));
    }
    s
}

/// Writes `cube` as a float32 header/binary pair (see [`envi_paths`]).
pub fn write_envi(cube: &HsiCube<f32>, path: impl AsRef<Path>, interleave: Interleave) -> Result<()> {
    let (header_path, data_path) = envi_paths(path.as_ref());
    let (rows, cols, bands) = (cube.rows(), cube.cols(), cube.bands());
    let mut bytes = vec![0u8; rows * cols * bands * 4];
    for r in 0..rows {
        for c in 0..cols {
            let px = cube.spectrum(r, c);
            for (b, v) in px.iter().enumerate() {
                let o = interleave.offset(rows, cols, bands, r, c, b) * 4;
                bytes[o..o + 4].copy_from_slice(&v.to_le_bytes());
            }
        }
    }
    fs::write(&data_path, &bytes).map_err(|e| Error::io(&data_path, e))?;
    fs::write(&header_path, render_header(cube, interleave)).map_err(|e| Error::io(&header_path, e))?;
    Ok(())
}
