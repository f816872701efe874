//! Two-dimensional rasters: edge strength maps and boolean edge masks.

use std::path::Path;

use crate::cube::{HsiCube, Interleave};
use crate::envi;
use crate::error::{Error, Result};
use crate::pgm::{self, Gray8};
use crate::scalar::Scalar;

/// Row-major boolean raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "mask of {} pixels for {rows}x{cols}",
                bits.len()
            )));
        }
        Ok(Mask { rows, cols, bits })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        Mask {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let bits = (0..rows * cols).map(|i| f(i / cols, i % cols)).collect();
        Mask { rows, cols, bits }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// `(row, col)` of every set pixel in row-major order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i / self.cols, i % self.cols))
            .collect()
    }

    pub fn same_shape(&self, other: &Mask) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Block-OR reduction by `factor`; trailing partial blocks are dropped.
    pub fn downsample(&self, factor: usize) -> Result<Mask> {
        if factor == 0 {
            return Err(Error::InvalidParameter("downsample factor must be positive".into()));
        }
        let (rows, cols) = (self.rows / factor, self.cols / factor);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "factor {factor} leaves no pixels of a {}x{} mask",
                self.rows, self.cols
            )));
        }
        Ok(Mask::from_fn(rows, cols, |r, c| {
            (0..factor).any(|dr| (0..factor).any(|dc| self.get(r * factor + dr, c * factor + dc)))
        }))
    }

    /// 0/255 grey image.
    pub fn to_gray(&self) -> Gray8 {
        Gray8 {
            rows: self.rows,
            cols: self.cols,
            pixels: self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }

    /// Any non-zero grey level is set.
    pub fn from_gray(img: &Gray8) -> Mask {
        Mask {
            rows: img.rows,
            cols: img.cols,
            bits: img.pixels.iter().map(|&p| p != 0).collect(),
        }
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        pgm::write_pgm(path, &self.to_gray())
    }

    pub fn read_pgm(path: impl AsRef<Path>) -> Result<Mask> {
        Ok(Mask::from_gray(&pgm::read_pgm(path)?))
    }
}

/// Ideal edge pixels used as evaluation reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthEdges {
    pub mask: Mask,
}

impl GroundTruthEdges {
    pub fn new(mask: Mask) -> Self {
        GroundTruthEdges { mask }
    }

    /// Truth for a block-downsampled cube: a coarse pixel is an edge if any
    /// of its fine pixels was.
    pub fn downsample(&self, factor: usize) -> Result<Self> {
        Ok(GroundTruthEdges {
            mask: self.mask.downsample(factor)?,
        })
    }
}

/// Thresholded edge map.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryEdgeMap {
    pub mask: Mask,
    /// Threshold in edge-strength units (NaN when not derived from a float map).
    pub threshold: f64,
    /// Set when no threshold exists (constant input); the mask is then empty.
    pub degenerate: bool,
}

impl BinaryEdgeMap {
    pub fn from_mask(mask: Mask) -> Self {
        BinaryEdgeMap {
            mask,
            threshold: f64::NAN,
            degenerate: false,
        }
    }
}

/// Non-negative edge strength per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap<T> {
    rows: usize,
    cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> EdgeMap<T> {
    pub fn new(rows: usize, cols: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "edge map of {} values for {rows}x{cols}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::InvalidParameter("edge strengths must be finite and non-negative".into()));
        }
        Ok(EdgeMap { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        EdgeMap {
            rows,
            cols,
            values: vec![T::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.cols + col]
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn cast<U: Scalar>(&self) -> EdgeMap<U> {
        EdgeMap {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|v| U::of(v.to_f64_lossless())).collect(),
        }
    }

    /// Min-max scaled 8-bit preview. A constant map renders black.
    pub fn to_gray(&self) -> Gray8 {
        let (lo, hi) = (self.min().to_f64_lossless(), self.max().to_f64_lossless());
        let span = hi - lo;
        let pixels = self
            .values
            .iter()
            .map(|v| {
                if span > 0.0 {
                    ((v.to_f64_lossless() - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
                } else {
                    0
                }
            })
            .collect();
        Gray8 {
            rows: self.rows,
            cols: self.cols,
            pixels,
        }
    }

    pub fn write_pgm(&self, path: impl AsRef<Path>) -> Result<()> {
        pgm::write_pgm(path, &self.to_gray())
    }

    /// Raw little-endian float32, row-major, with an ENVI sidecar header
    /// (`<path>.hdr`, one band) so the map can be re-read with [`envi::read_envi`].
    pub fn write_f32(&self, path: impl AsRef<Path>) -> Result<()> {
        let cube = HsiCube::new(
            self.rows,
            self.cols,
            1,
            self.values.iter().map(|v| v.to_f64_lossless() as f32).collect(),
        )?;
        envi::write_envi(&cube, path, Interleave::Bsq)
    }

    /// Reads a single-band float map written by [`EdgeMap::write_f32`]
    /// (pass either the raw file or its `.hdr`).
    pub fn read_f32(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let (header, _) = envi::envi_paths(path);
        let cube = envi::read_envi(header)?;
        if cube.bands() != 1 {
            return Err(Error::DimensionMismatch(format!(
                "edge map file has {} bands, expected 1",
                cube.bands()
            )));
        }
        EdgeMap::new(
            cube.rows(),
            cube.cols(),
            cube.data().iter().map(|&v| T::of(v as f64)).collect(),
        )
    }

    /// Grey levels of an 8-bit image as strengths.
    pub fn from_gray(img: &Gray8) -> Self {
        EdgeMap {
            rows: img.rows,
            cols: img.cols,
            values: img.pixels.iter().map(|&p| T::of(p as f64)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_block_or() {
        let m = Mask::from_fn(4, 5, |r, c| r == 1 && c == 2);
        let d = m.downsample(2).unwrap();
        assert_eq!((d.rows(), d.cols()), (2, 2));
        assert_eq!(d.points(), vec![(0, 1)]);
        assert!(m.downsample(0).is_err());
        assert!(m.downsample(5).is_err());
    }

    #[test]
    fn edge_map_validation_and_preview() {
        assert!(EdgeMap::<f64>::new(1, 2, vec![0.0, -1.0]).is_err());
        assert!(EdgeMap::<f64>::new(1, 2, vec![0.0]).is_err());
        let m = EdgeMap::<f64>::new(1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.to_gray().pixels, vec![0, 128, 255]);
        assert_eq!(EdgeMap::<f64>::zeros(1, 2).to_gray().pixels, vec![0, 0]);
    }

    #[test]
    fn f32_sidecar_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("edge.f32");
        let m = EdgeMap::<f32>::new(2, 2, vec![0.0, 0.5, 1.25, 3.0]).unwrap();
        m.write_f32(&p).unwrap();
        assert!(dir.path().join("edge.f32.hdr").is_file());
        assert_eq!(EdgeMap::<f32>::read_f32(&p).unwrap(), m);
        assert_eq!(EdgeMap::<f32>::read_f32(dir.path().join("edge.f32.hdr")).unwrap(), m);
    }
}
