//! Local spectral similarity: per-pixel distance patches and their
//! aggregation into an edge-strength map.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::metrics::{distance, MetricSpec};
use crate::raster::EdgeMap;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregator {
    Mean,
    Median,
    Min,
    Max,
    /// `(min + max) / 2`.
    Midpoint,
    /// Median absolute deviation from the median.
    Mad,
    /// Weighted sum with a flipped kernel.
    Conv,
}

impl Aggregator {
    pub const ALL: [Aggregator; 7] = [
        Aggregator::Mean,
        Aggregator::Median,
        Aggregator::Min,
        Aggregator::Max,
        Aggregator::Midpoint,
        Aggregator::Mad,
        Aggregator::Conv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Mean => "mean",
            Aggregator::Median => "median",
            Aggregator::Min => "min",
            Aggregator::Max => "max",
            Aggregator::Midpoint => "midpoint",
            Aggregator::Mad => "mad",
            Aggregator::Conv => "conv",
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Aggregator::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = Aggregator::ALL.iter().map(|a| a.name()).collect();
            Error::Parse(format!("unknown aggregator '{s}' (expected one of: {})", names.join(", ")))
        })
    }
}

/// How window positions outside the image are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Padding {
    /// Clamp coordinates to the nearest in-image pixel.
    #[default]
    Replicate,
    /// Leave the entry out of the statistic.
    ZeroSkip,
}

impl fmt::Display for Padding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Padding::Replicate => "replicate",
            Padding::ZeroSkip => "zero-skip",
        })
    }
}

impl FromStr for Padding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "replicate" => Ok(Padding::Replicate),
            "zero-skip" | "skip" => Ok(Padding::ZeroSkip),
            other => Err(Error::Parse(format!("unknown padding '{other}' (expected replicate or zero-skip)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LssConfig {
    /// Odd window side, at least 3.
    pub window: usize,
    pub metric: MetricSpec,
    pub aggregator: Aggregator,
    /// Row-major `window x window` non-negative weights for
    /// [`Aggregator::Conv`]; a uniform mean over the non-center entries when
    /// absent.
    pub kernel: Option<Vec<f64>>,
    pub padding: Padding,
}

impl LssConfig {
    pub fn new(window: usize, metric: impl Into<MetricSpec>, aggregator: Aggregator) -> Self {
        LssConfig {
            window,
            metric: metric.into(),
            aggregator,
            kernel: None,
            padding: Padding::Replicate,
        }
    }

    pub fn with_padding(mut self, padding: Padding) -> Self {
        self.padding = padding;
        self
    }

    pub fn with_kernel(mut self, kernel: Vec<f64>) -> Self {
        self.kernel = Some(kernel);
        self
    }

    pub fn half(&self) -> usize {
        self.window / 2
    }

    pub fn validate(&self) -> Result<()> {
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "window must be odd and >= 3, got {}",
                self.window
            )));
        }
        self.metric.validate()?;
        if let Some(kernel) = &self.kernel {
            if self.aggregator != Aggregator::Conv {
                return Err(Error::InvalidParameter(format!(
                    "a kernel is only used by the conv aggregator, not {}",
                    self.aggregator
                )));
            }
            if kernel.len() != self.window * self.window {
                return Err(Error::InvalidParameter(format!(
                    "kernel has {} weights, a {w}x{w} window needs {}",
                    kernel.len(),
                    self.window * self.window,
                    w = self.window
                )));
            }
            if kernel.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidParameter("kernel weights must be finite and non-negative".into()));
            }
        }
        Ok(())
    }

    /// Weight applied to patch entry `idx` (row-major): the kernel read
    /// back-to-front, so entry `(u, v)` meets `h[-u, -v]`. Center weight is 0.
    fn conv_weights<T: Scalar>(&self) -> Vec<T> {
        let n = self.window * self.window;
        let center = n / 2;
        (0..n)
            .map(|idx| {
                if idx == center {
                    T::zero()
                } else {
                    match &self.kernel {
                        Some(k) => T::of(k[n - 1 - idx]),
                        None => T::of(1.0 / (n - 1) as f64),
                    }
                }
            })
            .collect()
    }
}

/// Distances from a center spectrum to every position of its window.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityPatch<T> {
    window: usize,
    values: Vec<T>,
    excluded: Vec<bool>,
}

impl<T: Scalar> SimilarityPatch<T> {
    pub fn window(&self) -> usize {
        self.window
    }

    /// Row-major `window x window` distances; excluded entries hold 0.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn excluded(&self) -> &[bool] {
        &self.excluded
    }

    /// Entry at offset `(u, v)`, each in `-k..=k`; `None` when excluded.
    pub fn get(&self, u: isize, v: isize) -> Option<T> {
        let k = (self.window / 2) as isize;
        let idx = ((u + k) * self.window as isize + (v + k)) as usize;
        (!self.excluded[idx]).then(|| self.values[idx])
    }

    /// Non-excluded entries in row-major order.
    pub fn included(&self) -> impl Iterator<Item = T> + '_ {
        self.values.iter().zip(&self.excluded).filter(|(_, &x)| !x).map(|(&v, _)| v)
    }
}

#[inline]
fn clamp_offset(pos: usize, off: isize, len: usize) -> Option<usize> {
    let p = pos as isize + off;
    (p >= 0 && p < len as isize).then_some(p as usize)
}

fn fill_patch<T: Scalar>(
    cube: &HsiCube<T>,
    i: usize,
    j: usize,
    config: &LssConfig,
    values: &mut [T],
    excluded: &mut [bool],
) -> Result<()> {
    let k = config.half() as isize;
    let center = cube.spectrum(i, j);
    let mut idx = 0;
    for u in -k..=k {
        for v in -k..=k {
            if u == 0 && v == 0 {
                values[idx] = T::zero();
                excluded[idx] = true;
            } else {
                let pos = match config.padding {
                    Padding::Replicate => Some((
                        (i as isize + u).clamp(0, cube.rows() as isize - 1) as usize,
                        (j as isize + v).clamp(0, cube.cols() as isize - 1) as usize,
                    )),
                    Padding::ZeroSkip => clamp_offset(i, u, cube.rows()).zip(clamp_offset(j, v, cube.cols())),
                };
                match pos {
                    Some((r, c)) => {
                        values[idx] = distance(cube.spectrum(r, c), center, &config.metric)?;
                        excluded[idx] = false;
                    }
                    None => {
                        values[idx] = T::zero();
                        excluded[idx] = true;
                    }
                }
            }
            idx += 1;
        }
    }
    Ok(())
}

/// The similarity patch centered on pixel `(i, j)`.
pub fn similarity_patch<T: Scalar>(cube: &HsiCube<T>, i: usize, j: usize, config: &LssConfig) -> Result<SimilarityPatch<T>> {
    config.validate()?;
    if i >= cube.rows() || j >= cube.cols() {
        return Err(Error::OutOfRange(format!(
            "pixel ({i}, {j}) outside a {}x{} image",
            cube.rows(),
            cube.cols()
        )));
    }
    let n = config.window * config.window;
    let mut values = vec![T::zero(); n];
    let mut excluded = vec![false; n];
    fill_patch(cube, i, j, config, &mut values, &mut excluded)?;
    Ok(SimilarityPatch {
        window: config.window,
        values,
        excluded,
    })
}

fn total<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Median of `xs`, reordering it; even counts average the two middle values.
fn median_in_place<T: Scalar>(xs: &mut [T]) -> T {
    xs.sort_unstable_by(total);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / T::of(2.0)
    }
}

fn reduce<T: Scalar>(
    values: &[T],
    excluded: &[bool],
    aggregator: Aggregator,
    weights: &[T],
    scratch: &mut Vec<T>,
) -> Result<T> {
    scratch.clear();
    scratch.extend(values.iter().zip(excluded).filter(|(_, &x)| !x).map(|(&v, _)| v));
    if scratch.is_empty() {
        return Err(Error::Degenerate("every window entry is excluded".into()));
    }
    let y = match aggregator {
        Aggregator::Mean => scratch.iter().fold(T::zero(), |a, &v| a + v) / T::of(scratch.len() as f64),
        Aggregator::Median => median_in_place(scratch),
        Aggregator::Min => scratch.iter().copied().fold(T::infinity(), T::min),
        Aggregator::Max => scratch.iter().copied().fold(T::neg_infinity(), T::max),
        Aggregator::Midpoint => {
            let lo = scratch.iter().copied().fold(T::infinity(), T::min);
            let hi = scratch.iter().copied().fold(T::neg_infinity(), T::max);
            (lo + hi) / T::of(2.0)
        }
        Aggregator::Mad => {
            let med = median_in_place(scratch);
            scratch.iter_mut().for_each(|v| *v = (*v - med).abs());
            median_in_place(scratch)
        }
        Aggregator::Conv => values
            .iter()
            .zip(excluded)
            .zip(weights)
            .filter(|((_, &x), _)| !x)
            .fold(T::zero(), |a, ((&v, _), &w)| a + v * w),
    };
    Ok(y)
}

/// Reduces a patch to one edge strength.
pub fn aggregate<T: Scalar>(patch: &SimilarityPatch<T>, config: &LssConfig) -> Result<T> {
    config.validate()?;
    if patch.window != config.window {
        return Err(Error::DimensionMismatch(format!(
            "patch window {} but config window {}",
            patch.window, config.window
        )));
    }
    let weights = config.conv_weights::<T>();
    let mut scratch = Vec::with_capacity(patch.values.len());
    reduce(&patch.values, &patch.excluded, config.aggregator, &weights, &mut scratch)
}

/// Edge strength of every pixel, computed on the current rayon pool.
///
/// Rows are distributed across workers and each output value is computed
/// entirely by one worker, so the result does not depend on thread count.
pub fn edge_map<T: Scalar>(cube: &HsiCube<T>, config: &LssConfig, exclude_bands: Option<&[usize]>) -> Result<EdgeMap<T>> {
    config.validate()?;
    let reduced;
    let cube = match exclude_bands {
        Some(list) if !list.is_empty() => {
            reduced = cube.exclude_bands(list)?;
            &reduced
        }
        _ => cube,
    };
    let limit = 2 * cube.rows().min(cube.cols()) - 1;
    if config.window > limit {
        return Err(Error::InvalidParameter(format!(
            "window {} too large for a {}x{} image (max {limit})",
            config.window,
            cube.rows(),
            cube.cols()
        )));
    }
    let n = config.window * config.window;
    let weights = config.conv_weights::<T>();
    let cols = cube.cols();
    let mut out = vec![T::zero(); cube.pixel_count()];
    out.par_chunks_mut(cols).enumerate().try_for_each_init(
        || (vec![T::zero(); n], vec![false; n], Vec::with_capacity(n)),
        |(values, excluded, scratch), (i, row)| -> Result<()> {
            for (j, y) in row.iter_mut().enumerate() {
                fill_patch(cube, i, j, config, values, excluded)?;
                *y = reduce(values, excluded, config.aggregator, &weights, scratch)?;
            }
            Ok(())
        },
    )?;
    EdgeMap::new(cube.rows(), cols, out)
}

/// [`edge_map`] on a dedicated pool of `threads` workers (0 = rayon default).
pub fn edge_map_with_threads<T: Scalar>(
    cube: &HsiCube<T>,
    config: &LssConfig,
    exclude_bands: Option<&[usize]>,
    threads: usize,
) -> Result<EdgeMap<T>> {
    with_threads(threads, || edge_map(cube, config, exclude_bands))
}

/// Runs `f` inside a local rayon pool of `threads` workers (0 = rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
