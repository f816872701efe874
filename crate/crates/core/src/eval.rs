//! Otsu binarization and edge-map scoring (false alarms, misses, Pratt's
//! figure of merit).

use std::fmt;

use crate::error::{Error, Result};
use crate::raster::{BinaryEdgeMap, EdgeMap, GroundTruthEdges, Mask};
use crate::scalar::Scalar;

/// Conventional Pratt scaling constant.
pub const DEFAULT_ALPHA: f64 = 1.0 / 9.0;

pub const OTSU_LEVELS: usize = 256;

/// Grey level of `v` after min-max quantization of `[lo, hi]` to 256 bins.
pub fn quantize_level(v: f64, lo: f64, hi: f64) -> usize {
    let level = ((v - lo) / (hi - lo) * OTSU_LEVELS as f64).floor();
    (level.max(0.0) as usize).min(OTSU_LEVELS - 1)
}

/// 256-bin histogram of the map, with its min and max. `None` for constant maps.
pub fn level_histogram<T: Scalar>(map: &EdgeMap<T>) -> Option<(Vec<u64>, f64, f64)> {
    let (lo, hi) = (map.min().to_f64_lossless(), map.max().to_f64_lossless());
    if !(hi > lo) {
        return None;
    }
    let mut hist = vec![0u64; OTSU_LEVELS];
    for v in map.values() {
        hist[quantize_level(v.to_f64_lossless(), lo, hi)] += 1;
    }
    Some((hist, lo, hi))
}

/// `a * b` as a 256-bit `(high, low)` pair.
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & MASK) + (p10 & MASK);
    let low = (p00 & MASK) | (mid << 64);
    let high = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (high, low)
}

/// Level `t` maximizing between-class variance when class 0 is `level <= t`.
///
/// For a split with `n0, n1` pixels and level sums `s0, s1` the variance is
/// proportional to `(n0*s1 - n1*s0)^2 / (n0*n1)`; candidates are compared
/// exactly by cross-multiplication. Ties keep the lowest `t`.
pub fn otsu_level(hist: &[u64]) -> usize {
    let n: u128 = hist.iter().map(|&h| h as u128).sum();
    let s: u128 = hist.iter().enumerate().map(|(l, &h)| l as u128 * h as u128).sum();
    // best score held as numerator / denominator
    let mut best = (0u128, 1u128, 0usize);
    let (mut n0, mut s0) = (0u128, 0u128);
    for (t, &h) in hist.iter().enumerate() {
        n0 += h as u128;
        s0 += t as u128 * h as u128;
        let n1 = n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s1 = s - s0;
        let diff = (n0 * s1).abs_diff(n1 * s0);
        let num = diff * diff;
        let den = n0 * n1;
        if widening_mul(num, best.1) > widening_mul(best.0, den) {
            best = (num, den, t);
        }
    }
    best.2
}

/// Otsu binarization on a 256-level min-max quantization; the mask holds
/// pixels whose level is above the chosen split. A constant map yields an
/// empty mask flagged as degenerate.
pub fn otsu_threshold<T: Scalar>(map: &EdgeMap<T>) -> BinaryEdgeMap {
    match level_histogram(map) {
        None => BinaryEdgeMap {
            mask: Mask::empty(map.rows(), map.cols()),
            threshold: f64::NAN,
            degenerate: true,
        },
        Some((hist, lo, hi)) => {
            let t = otsu_level(&hist);
            let mask = Mask::new(
                map.rows(),
                map.cols(),
                map.values()
                    .iter()
                    .map(|v| quantize_level(v.to_f64_lossless(), lo, hi) > t)
                    .collect(),
            )
            .expect("mask shaped like its map");
            BinaryEdgeMap {
                mask,
                threshold: lo + (t + 1) as f64 * (hi - lo) / OTSU_LEVELS as f64,
                degenerate: false,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    /// Detected pixels with no ideal pixel in their 8-neighborhood.
    pub fac: usize,
    /// Ideal pixels with no detected pixel in their 8-neighborhood.
    pub mc: usize,
    /// Figure of merit in `[0, 1]`.
    pub fom: f64,
    pub alpha: f64,
    pub n_ideal: usize,
    pub n_actual: usize,
}

impl EvalReport {
    pub fn fom100(&self) -> f64 {
        self.fom * 100.0
    }

    pub const CSV_HEADER: &'static str = "fac,mc,fom,fom100";

    pub fn csv_row(&self) -> String {
        format!("{},{},{:.6},{:.2}", self.fac, self.mc, self.fom, self.fom100())
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ideal edge pixels:    {}", self.n_ideal)?;
        writeln!(f, "detected edge pixels: {}", self.n_actual)?;
        writeln!(f, "false alarms (FAC):   {}", self.fac)?;
        writeln!(f, "misses (MC):          {}", self.mc)?;
        write!(f, "FOM (alpha={:.4}):    {:.4} ({:.2})", self.alpha, self.fom, self.fom100())
    }
}

/// Exact squared Euclidean distance from every pixel to the nearest set
/// pixel of `mask` (`f64::INFINITY` everywhere when the mask is empty),
/// by separable lower-envelope passes.
pub fn squared_distance_transform(mask: &Mask) -> Vec<f64> {
    let (rows, cols) = (mask.rows(), mask.cols());
    let mut grid: Vec<f64> = mask.bits().iter().map(|&b| if b { 0.0 } else { f64::INFINITY }).collect();
    let mut line = Vec::new();
    let mut out = Vec::new();
    for c in 0..cols {
        line.clear();
        line.extend((0..rows).map(|r| grid[r * cols + c]));
        envelope_1d(&line, &mut out);
        for r in 0..rows {
            grid[r * cols + c] = out[r];
        }
    }
    for r in 0..rows {
        line.clear();
        line.extend_from_slice(&grid[r * cols..(r + 1) * cols]);
        envelope_1d(&line, &mut out);
        grid[r * cols..(r + 1) * cols].copy_from_slice(&out);
    }
    grid
}

/// `out[q] = min_p (q - p)^2 + f[p]` over finite `f[p]`.
fn envelope_1d(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    let sites: Vec<usize> = (0..n).filter(|&p| f[p].is_finite()).collect();
    if sites.is_empty() {
        return;
    }
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    let intersect = |p: usize, q: usize| {
        let (pf, qf) = (p as f64, q as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
    };
    for &q in &sites {
        while let Some(&p) = v.last() {
            if intersect(p, q) <= *z.last().expect("boundary per site") {
                v.pop();
                z.pop();
            } else {
                break;
            }
        }
        z.push(if v.is_empty() { f64::NEG_INFINITY } else { intersect(*v.last().unwrap(), q) });
        v.push(q);
    }
    z.push(f64::INFINITY);
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}

/// 8-neighborhood tolerance as a squared distance.
const MATCH_RADIUS_SQ: f64 = 2.0;

/// Scores a binary edge map against ideal edges.
pub fn evaluate(actual: &BinaryEdgeMap, ideal: &GroundTruthEdges, alpha: f64) -> Result<EvalReport> {
    evaluate_masks(&actual.mask, &ideal.mask, alpha)
}

pub fn evaluate_masks(actual: &Mask, ideal: &Mask, alpha: f64) -> Result<EvalReport> {
    if !actual.same_shape(ideal) {
        return Err(Error::DimensionMismatch(format!(
            "edge map is {}x{}, ground truth is {}x{}",
            actual.rows(),
            actual.cols(),
            ideal.rows(),
            ideal.cols()
        )));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let n_ideal = ideal.count();
    if n_ideal == 0 {
        return Err(Error::Degenerate("ground truth has no edge pixels".into()));
    }
    let n_actual = actual.count();
    let to_ideal = squared_distance_transform(ideal);
    let to_actual = squared_distance_transform(actual);
    let mut fac = 0;
    let mut sum = 0.0;
    for (i, _) in actual.bits().iter().enumerate().filter(|(_, &b)| b) {
        let d2 = to_ideal[i];
        if d2 > MATCH_RADIUS_SQ {
            fac += 1;
        }
        sum += 1.0 / (1.0 + alpha * d2);
    }
    let mc = ideal
        .bits()
        .iter()
        .enumerate()
        .filter(|&(i, &b)| b && to_actual[i] > MATCH_RADIUS_SQ)
        .count();
    Ok(EvalReport {
        fac,
        mc,
        fom: sum / n_ideal.max(n_actual) as f64,
        alpha,
        n_ideal,
        n_actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(values: &[f64]) -> EdgeMap<f64> {
        EdgeMap::new(1, values.len(), values.to_vec()).unwrap()
    }

    #[test]
    fn bimodal_split() {
        let b = otsu_threshold(&map(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0]));
        assert_eq!(b.mask.bits(), &[false, false, false, false, true, true, true, true]);
        assert!(!b.degenerate && b.threshold > 0.0 && b.threshold <= 1.0);
    }

    #[test]
    fn constant_is_degenerate() {
        let b = otsu_threshold(&map(&[2.0; 5]));
        assert!(b.degenerate);
        assert_eq!(b.mask.count(), 0);
    }

    #[test]
    fn wide_multiply() {
        let a = u128::MAX;
        assert_eq!(widening_mul(a, a), (u128::MAX - 1, 1));
        assert_eq!(widening_mul(1 << 100, 1 << 100), (1 << 72, 0));
        assert_eq!(widening_mul(12345, 678), (0, 12345 * 678));
    }

    #[test]
    fn distance_transform_brute_force() {
        let m = Mask::from_fn(7, 9, |r, c| (r * 5 + c * 3) % 11 == 0);
        let pts = m.points();
        let dt = squared_distance_transform(&m);
        for r in 0..7 {
            for c in 0..9 {
                let want = pts
                    .iter()
                    .map(|&(pr, pc)| (pr as f64 - r as f64).powi(2) + (pc as f64 - c as f64).powi(2))
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(dt[r * 9 + c], want);
            }
        }
        assert!(squared_distance_transform(&Mask::empty(2, 2)).iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn hand_cases() {
        let ideal = Mask::from_fn(5, 5, |_, c| c == 2);
        let r = evaluate_masks(&ideal, &ideal, DEFAULT_ALPHA).unwrap();
        assert_eq!((r.fac, r.mc, r.fom), (0, 0, 1.0));
        let one = Mask::from_fn(5, 5, |r, c| r == 2 && c == 2);
        let shifted = Mask::from_fn(5, 5, |r, c| r == 2 && c == 3);
        let r = evaluate_masks(&shifted, &one, DEFAULT_ALPHA).unwrap();
        assert!((r.fom - 0.9).abs() < 1e-12);
        assert_eq!((r.fac, r.mc), (0, 0));
        let mut bits = ideal.bits().to_vec();
        bits[0] = true; // (0,0): two columns away
        let extra = Mask::new(5, 5, bits).unwrap();
        let r = evaluate_masks(&extra, &ideal, DEFAULT_ALPHA).unwrap();
        assert_eq!((r.fac, r.mc), (1, 0));
        assert!((r.fom - (5.0 + 1.0 / (1.0 + 4.0 / 9.0)) / 6.0).abs() < 1e-12);
    }

    #[test]
    fn evaluation_errors() {
        let a = Mask::empty(3, 3);
        assert!(evaluate_masks(&a, &a, DEFAULT_ALPHA).is_err());
        assert!(evaluate_masks(&a, &Mask::empty(3, 4), DEFAULT_ALPHA).is_err());
        let g = Mask::from_fn(3, 3, |r, _| r == 1);
        assert!(evaluate_masks(&a, &g, 0.0).is_err());
        let r = evaluate_masks(&a, &g, DEFAULT_ALPHA).unwrap();
        assert_eq!((r.fac, r.mc, r.fom), (0, 3, 0.0));
    }

    #[test]
    fn csv_layout() {
        let r = EvalReport {
            fac: 1,
            mc: 2,
            fom: 0.5,
            alpha: DEFAULT_ALPHA,
            n_ideal: 4,
            n_actual: 3,
        };
        assert_eq!(r.csv_row(), "1,2,0.500000,50.00");
    }
}
