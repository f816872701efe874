//! Normalized mutual information between band images and edge labels.

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::raster::GroundTruthEdges;
use crate::scalar::Scalar;

pub const DEFAULT_BINS: usize = 64;

/// Equal-width bin index of every value; a constant input maps to bin 0.
pub fn quantize_equal_width(values: &[f64], bins: usize) -> Vec<usize> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return vec![0; values.len()];
    }
    values
        .iter()
        .map(|&v| (((v - lo) / (hi - lo) * bins as f64).floor() as usize).min(bins - 1))
        .collect()
}

fn entropy(counts: &[usize], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `2 I(A; B) / (H(A) + H(B))` for two discrete labelings (natural log).
/// Zero when both are constant.
pub fn normalized_mutual_information(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("mutual information of empty labelings".into()));
    }
    let na = a.iter().max().map_or(0, |m| m + 1);
    let nb = b.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![0usize; na * nb];
    let (mut ca, mut cb) = (vec![0usize; na], vec![0usize; nb]);
    for (&x, &y) in a.iter().zip(b) {
        joint[x * nb + y] += 1;
        ca[x] += 1;
        cb[y] += 1;
    }
    let n = a.len() as f64;
    let (ha, hb) = (entropy(&ca, n), entropy(&cb, n));
    if ha + hb == 0.0 {
        return Ok(0.0);
    }
    let hab = entropy(&joint, n);
    let mi = (ha + hb - hab).max(0.0);
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

/// NMI of each band (quantized to `bins` equal-width bins) against the
/// binary edge labels.
pub fn band_mi_sensitivity<T: Scalar>(cube: &HsiCube<T>, truth: &GroundTruthEdges, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 bins, got {bins}")));
    }
    let mask = &truth.mask;
    if mask.rows() != cube.rows() || mask.cols() != cube.cols() {
        return Err(Error::DimensionMismatch(format!(
            "truth is {}x{}, cube is {}x{}",
            mask.rows(),
            mask.cols(),
            cube.rows(),
            cube.cols()
        )));
    }
    let edges: Vec<usize> = mask.bits().iter().map(|&b| usize::from(b)).collect();
    let set = mask.count();
    if set == 0 || set == edges.len() {
        return Err(Error::Degenerate("edge labels are constant; their entropy is zero".into()));
    }
    (0..cube.bands())
        .map(|b| {
            let band: Vec<f64> = cube.band_image(b).iter().map(|v| v.to_f64_lossless()).collect();
            normalized_mutual_information(&quantize_equal_width(&band, bins), &edges)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Mask;

    #[test]
    fn constant_and_identical_bands() {
        let mask = Mask::from_fn(4, 4, |_, c| c == 1);
        let cube = HsiCube::from_fn(4, 4, 2, |_, c, b| if b == 0 { 3.0 } else { f64::from(c == 1) }).unwrap();
        let nmi = band_mi_sensitivity(&cube, &GroundTruthEdges::new(mask), 2).unwrap();
        assert_eq!(nmi[0], 0.0);
        assert!((nmi[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let cube = HsiCube::from_fn(2, 2, 1, |r, _, _| r as f64).unwrap();
        let flat = GroundTruthEdges::new(Mask::empty(2, 2));
        assert!(band_mi_sensitivity(&cube, &flat, 8).is_err());
        let good = GroundTruthEdges::new(Mask::from_fn(2, 2, |r, _| r == 0));
        assert!(band_mi_sensitivity(&cube, &good, 1).is_err());
        assert!(band_mi_sensitivity(&cube, &GroundTruthEdges::new(Mask::empty(3, 2)), 8).is_err());
    }

    #[test]
    fn relabeling_invariance() {
        let a = [0, 1, 2, 2, 1, 0, 0, 2];
        let b = [0, 1, 1, 1, 0, 0, 1, 1];
        let relabeled: Vec<usize> = a.iter().map(|&x| [2, 0, 1][x]).collect();
        let x = normalized_mutual_information(&a, &b).unwrap();
        let y = normalized_mutual_information(&relabeled, &b).unwrap();
        assert!((x - y).abs() < 1e-12);
    }
}
