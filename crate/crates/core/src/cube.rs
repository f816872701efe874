//! In-memory hyperspectral cube.
//!
//! Samples are stored band-interleaved-by-pixel so that the spectrum of a
//! pixel is one contiguous slice. The `interleave` field only records how
//! the cube was (or will be) laid out on disk.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// On-disk sample ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Interleave {
    /// Band sequential.
    Bsq,
    /// Band interleaved by line.
    Bil,
    /// Band interleaved by pixel.
    #[default]
    Bip,
}

impl Interleave {
    pub const ALL: [Interleave; 3] = [Interleave::Bsq, Interleave::Bil, Interleave::Bip];

    pub fn as_str(self) -> &'static str {
        match self {
            Interleave::Bsq => "bsq",
            Interleave::Bil => "bil",
            Interleave::Bip => "bip",
        }
    }

    /// Linear offset of sample `(row, col, band)` in a file with this layout.
    #[inline]
    pub fn offset(self, rows: usize, cols: usize, bands: usize, row: usize, col: usize, band: usize) -> usize {
        match self {
            Interleave::Bsq => (band * rows + row) * cols + col,
            Interleave::Bil => (row * bands + band) * cols + col,
            Interleave::Bip => (row * cols + col) * bands + band,
        }
    }
}

impl fmt::Display for Interleave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interleave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsq" => Ok(Interleave::Bsq),
            "bil" => Ok(Interleave::Bil),
            "bip" => Ok(Interleave::Bip),
            other => Err(Error::Parse(format!("unknown interleave '{other}' (expected bsq, bil or bip)"))),
        }
    }
}

/// A single pixel spectrum: non-empty, all components finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T>(Vec<T>);

impl<T: Scalar> Spectrum<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("spectrum must have at least one band".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("spectrum component {i} is not finite")));
        }
        Ok(Spectrum(values))
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for Spectrum<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// A `rows × cols × bands` raster of finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct HsiCube<T> {
    rows: usize,
    cols: usize,
    bands: usize,
    data: Vec<T>,
    interleave: Interleave,
    wavelengths: Option<Vec<f64>>,
}

impl<T: Scalar> HsiCube<T> {
    /// Builds a cube from BIP-ordered samples.
    pub fn new(rows: usize, cols: usize, bands: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 || bands == 0 {
            return Err(Error::InvalidCube(format!("dimensions must be positive, got {rows}x{cols}x{bands}")));
        }
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(bands))
            .ok_or_else(|| Error::InvalidCube("dimensions overflow".into()))?;
        if data.len() != expected {
            return Err(Error::InvalidCube(format!(
                "data length {} does not match {rows}x{cols}x{bands}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            let (pix, band) = (i / bands, i % bands);
            return Err(Error::InvalidCube(format!(
                "non-finite sample at row {}, col {}, band {band}",
                pix / cols,
                pix % cols
            )));
        }
        Ok(HsiCube {
            rows,
            cols,
            bands,
            data,
            interleave: Interleave::Bip,
            wavelengths: None,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, bands: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols * bands);
        for r in 0..rows {
            for c in 0..cols {
                for b in 0..bands {
                    data.push(f(r, c, b));
                }
            }
        }
        Self::new(rows, cols, bands, data)
    }

    /// Attaches band centre wavelengths (nm); must be strictly increasing.
    pub fn with_wavelengths(mut self, wavelengths: Vec<f64>) -> Result<Self> {
        if wavelengths.len() != self.bands {
            return Err(Error::InvalidCube(format!(
                "{} wavelengths for {} bands",
                wavelengths.len(),
                self.bands
            )));
        }
        if wavelengths.iter().any(|w| !w.is_finite()) || wavelengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCube("wavelengths must be finite and strictly increasing".into()));
        }
        self.wavelengths = Some(wavelengths);
        Ok(self)
    }

    pub fn with_interleave(mut self, interleave: Interleave) -> Self {
        self.interleave = interleave;
        self
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn bands(&self) -> usize {
        self.bands
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.rows * self.cols
    }

    pub fn interleave(&self) -> Interleave {
        self.interleave
    }

    pub fn wavelengths(&self) -> Option<&[f64]> {
        self.wavelengths.as_deref()
    }

    /// BIP-ordered samples.
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn spectrum(&self, row: usize, col: usize) -> &[T] {
        let start = (row * self.cols + col) * self.bands;
        &self.data[start..start + self.bands]
    }

    /// Spectrum by linear pixel index (`row * cols + col`).
    #[inline]
    pub fn pixel(&self, index: usize) -> &[T] {
        let start = index * self.bands;
        &self.data[start..start + self.bands]
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, band: usize) -> T {
        self.data[(row * self.cols + col) * self.bands + band]
    }

    /// One band as a row-major image.
    pub fn band_image(&self, band: usize) -> Vec<T> {
        self.data.iter().skip(band).step_by(self.bands).copied().collect()
    }

    pub fn cast<U: Scalar>(&self) -> HsiCube<U> {
        HsiCube {
            rows: self.rows,
            cols: self.cols,
            bands: self.bands,
            data: self.data.iter().map(|v| U::of(v.to_f64_lossless())).collect(),
            interleave: self.interleave,
            wavelengths: self.wavelengths.clone(),
        }
    }

    /// Keeps only the listed bands, in the given order.
    pub fn select_bands(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidParameter("band selection is empty".into()));
        }
        if let Some(&b) = keep.iter().find(|&&b| b >= self.bands) {
            return Err(Error::OutOfRange(format!("band {b} (cube has {} bands)", self.bands)));
        }
        let mut data = Vec::with_capacity(self.pixel_count() * keep.len());
        for px in self.data.chunks_exact(self.bands) {
            data.extend(keep.iter().map(|&b| px[b]));
        }
        let wavelengths = self.wavelengths.as_ref().map(|w| keep.iter().map(|&b| w[b]).collect());
        Ok(HsiCube {
            rows: self.rows,
            cols: self.cols,
            bands: keep.len(),
            data,
            interleave: self.interleave,
            wavelengths,
        })
    }

    /// Drops the listed bands. Duplicates are allowed; an index out of range is an error.
    pub fn exclude_bands(&self, excluded: &[usize]) -> Result<Self> {
        if let Some(&b) = excluded.iter().find(|&&b| b >= self.bands) {
            return Err(Error::OutOfRange(format!("band {b} (cube has {} bands)", self.bands)));
        }
        let keep: Vec<usize> = (0..self.bands).filter(|b| !excluded.contains(b)).collect();
        if keep.is_empty() {
            return Err(Error::InvalidParameter("every band is excluded".into()));
        }
        self.select_bands(&keep)
    }
}

/// Parses a band list such as `0-5,107-112,200` into sorted, de-duplicated indices.
pub fn parse_band_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad band index '{t}' in '{s}'")))
        };
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (parse(lo)?, parse(hi)?);
                if hi < lo {
                    return Err(Error::Parse(format!("descending band range '{part}'")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(parse(part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
