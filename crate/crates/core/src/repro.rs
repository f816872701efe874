//! Named synthetic experiments: scenes plus the pipelines that score them.

use std::fmt::Write as _;

use crate::baselines::{baseline_edge_map, BaselineKind};
use crate::cluster::{best_permutation_errors, kmeans_cluster, MASKED};
use crate::cube::HsiCube;
use crate::degrade::{add_gaussian_noise, downsample};
use crate::error::Result;
use crate::eval::{evaluate, otsu_threshold, EvalReport, DEFAULT_ALPHA};
use crate::lss::{edge_map, Aggregator, LssConfig};
use crate::metrics::{MetricKind, MetricSpec};
use crate::pca::{pca_fit, pca_project};
use crate::raster::{GroundTruthEdges, Mask};
use crate::scalar::Scalar;
use crate::synth::{synth_scene, Region, RegionShape, SceneSpec};

pub const SCENE_SIZE: usize = 64;
pub const SCENE_BANDS: usize = 50;

fn unit_positions(bands: usize) -> impl Iterator<Item = f64> {
    let last = (bands.max(2) - 1) as f64;
    (0..bands).map(move |b| b as f64 / last)
}

/// Low reflectance rising gently with wavelength (bare soil).
pub fn dark_endmember(bands: usize) -> Vec<f64> {
    unit_positions(bands).map(|t| 0.08 + 0.1 * t - 0.04 * t * t).collect()
}

/// Bright reflectance rising with wavelength, with a broad hump (cropland).
pub fn bright_endmember(bands: usize) -> Vec<f64> {
    unit_positions(bands)
        .map(|t| 0.3 + 0.35 * t + 0.05 * (std::f64::consts::PI * t).sin())
        .collect()
}

/// Reflectance falling with wavelength, with one full oscillation.
pub fn third_endmember(bands: usize) -> Vec<f64> {
    unit_positions(bands)
        .map(|t| 0.45 - 0.3 * t + 0.1 * (2.0 * std::f64::consts::PI * t).sin())
        .collect()
}

fn wavelengths(bands: usize) -> Vec<f64> {
    unit_positions(bands).map(|t| 400.0 + 2100.0 * t).collect()
}

/// Dark and bright regions split by the slanted line `row + 2 col = 96`
/// (bright side `row + 2 col >= 96`) on a 64x64x50 grid.
pub fn boundary_scene(mix_width: usize) -> SceneSpec {
    let mut spec = SceneSpec::two_region(
        SCENE_SIZE,
        SCENE_SIZE,
        dark_endmember(SCENE_BANDS),
        bright_endmember(SCENE_BANDS),
        (1.0, 2.0, 97.0),
        mix_width,
    );
    spec.wavelengths = Some(wavelengths(SCENE_BANDS));
    spec
}

/// Dark and bright halves split between columns 31 and 32.
pub fn vertical_scene(mix_width: usize) -> SceneSpec {
    let mut spec = SceneSpec::two_region(
        SCENE_SIZE,
        SCENE_SIZE,
        dark_endmember(SCENE_BANDS),
        bright_endmember(SCENE_BANDS),
        (0.0, 1.0, 32.0),
        mix_width,
    );
    spec.wavelengths = Some(wavelengths(SCENE_BANDS));
    spec
}

/// A two-column bright strip (columns 31-32) across a dark background.
pub fn strip_scene(mix_width: usize) -> SceneSpec {
    SceneSpec {
        rows: SCENE_SIZE,
        cols: SCENE_SIZE,
        bands: SCENE_BANDS,
        regions: vec![
            Region {
                shape: RegionShape::Rect {
                    row0: 0,
                    col0: 31,
                    row1: SCENE_SIZE,
                    col1: 33,
                },
                endmember: bright_endmember(SCENE_BANDS),
            },
            Region {
                shape: RegionShape::Everything,
                endmember: dark_endmember(SCENE_BANDS),
            },
        ],
        boundary_mix_width: mix_width,
        seed: 0,
        jitter: 0.0,
        wavelengths: Some(wavelengths(SCENE_BANDS)),
    }
}

/// Three regions: a bright triangle, a slanted third-material band and a
/// dark background.
pub fn three_region_scene() -> SceneSpec {
    SceneSpec {
        rows: 48,
        cols: 48,
        bands: SCENE_BANDS,
        regions: vec![
            Region {
                shape: RegionShape::Polygon {
                    vertices: vec![[4.0, 6.0], [30.0, 10.0], [12.0, 34.0]],
                },
                endmember: bright_endmember(SCENE_BANDS),
            },
            Region {
                shape: RegionShape::HalfPlane { a: -1.0, b: 1.0, c: 10.0 },
                endmember: third_endmember(SCENE_BANDS),
            },
            Region {
                shape: RegionShape::Everything,
                endmember: dark_endmember(SCENE_BANDS),
            },
        ],
        boundary_mix_width: 1,
        seed: 0,
        jitter: 0.0,
        wavelengths: Some(wavelengths(SCENE_BANDS)),
    }
}

fn median(metric: impl Into<MetricSpec>, window: usize) -> LssConfig {
    LssConfig::new(window, metric, Aggregator::Median)
}

/// Otsu-binarized LSS map scored against the truth.
pub fn score_lss<T: Scalar>(cube: &HsiCube<T>, truth: &GroundTruthEdges, config: &LssConfig) -> Result<EvalReport> {
    let map = edge_map(cube, config, None)?;
    evaluate(&otsu_threshold(&map), truth, DEFAULT_ALPHA)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub metric: MetricKind,
    pub mean: EvalReport,
    pub median: EvalReport,
}

/// Every metric under mean and median aggregation (3x3) on the mixed
/// slanted boundary.
pub fn table1() -> Result<Vec<Table1Row>> {
    let (cube, truth) = synth_scene::<f32>(&boundary_scene(1))?;
    MetricKind::ALL
        .into_iter()
        .map(|metric| {
            Ok(Table1Row {
                metric,
                mean: score_lss(&cube, &truth, &LssConfig::new(3, metric, Aggregator::Mean))?,
                median: score_lss(&cube, &truth, &median(metric, 3))?,
            })
        })
        .collect()
}

pub fn table1_csv(rows: &[Table1Row]) -> String {
    let mut s = String::from("metric,mean_fac,mean_mc,mean_fom100,median_fac,median_mc,median_fom100\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.2},{},{},{:.2}",
            r.metric.name(),
            r.mean.fac,
            r.mean.mc,
            r.mean.fom100(),
            r.median.fac,
            r.median.mc,
            r.median.fom100()
        );
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineComparison {
    pub lss: EvalReport,
    pub baselines: Vec<(BaselineKind, EvalReport)>,
}

impl BaselineComparison {
    pub fn best_baseline(&self) -> (BaselineKind, EvalReport) {
        self.baselines
            .iter()
            .copied()
            .max_by(|a, b| a.1.fom.total_cmp(&b.1.fom))
            .expect("eleven baselines")
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("detector,{}\n", EvalReport::CSV_HEADER);
        let _ = writeln!(s, "lss-median-eu,{}", self.lss.csv_row());
        for (k, r) in &self.baselines {
            let _ = writeln!(s, "{},{}", k.name(), r.csv_row());
        }
        s
    }
}

/// Median-EU LSS against all gradient and Sobel detectors on the Table 1 scene.
pub fn baselines() -> Result<BaselineComparison> {
    let (cube, truth) = synth_scene::<f32>(&boundary_scene(1))?;
    let lss = score_lss(&cube, &truth, &median(MetricKind::Euclidean, 3))?;
    let baselines = BaselineKind::ALL
        .into_iter()
        .map(|k| {
            let map = baseline_edge_map(&cube, k)?;
            Ok((k, evaluate(&otsu_threshold(&map), &truth, DEFAULT_ALPHA)?))
        })
        .collect::<Result<_>>()?;
    Ok(BaselineComparison { lss, baselines })
}

pub const NOISE_MAX_VARIANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRow {
    pub seed: u64,
    pub small: EvalReport,
    pub large: EvalReport,
}

/// Median-FRACT with 3x3 and 7x7 windows on noisy copies of the boundary scene.
pub fn noise(seeds: &[u64], max_variance: f64) -> Result<Vec<NoiseRow>> {
    let (clean, truth) = synth_scene::<f32>(&boundary_scene(1))?;
    let fract = MetricSpec::new(MetricKind::Fractional);
    seeds
        .iter()
        .map(|&seed| {
            let cube = add_gaussian_noise(&clean, max_variance, seed)?;
            Ok(NoiseRow {
                seed,
                small: score_lss(&cube, &truth, &median(fract, 3))?,
                large: score_lss(&cube, &truth, &median(fract, 7))?,
            })
        })
        .collect()
}

pub fn noise_csv(rows: &[NoiseRow]) -> String {
    let mut s = String::from("seed,fom_3x3,fom_7x7\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.6},{:.6}", r.seed, r.small.fom, r.large.fom);
    }
    s
}

/// Otsu-positive pixel count of Median-EU maps for each window.
pub fn windows(sizes: &[usize]) -> Result<Vec<(usize, usize)>> {
    let (cube, _) = synth_scene::<f32>(&boundary_scene(1))?;
    sizes
        .iter()
        .map(|&w| {
            let map = edge_map(&cube, &median(MetricKind::Euclidean, w), None)?;
            Ok((w, otsu_threshold(&map).mask.count()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DownsampleRow {
    pub factor: usize,
    pub max_edge: f64,
    pub report: EvalReport,
}

/// Median-EU on block-averaged copies of the vertical scene, scored against
/// block-OR reduced truth.
pub fn downsampling(factors: &[usize]) -> Result<Vec<DownsampleRow>> {
    let (cube, truth) = synth_scene::<f32>(&vertical_scene(1))?;
    factors
        .iter()
        .map(|&f| {
            let small = downsample(&cube, f)?;
            let small_truth = truth.downsample(f)?;
            let map = edge_map(&small, &median(MetricKind::Euclidean, 3), None)?;
            Ok(DownsampleRow {
                factor: f,
                max_edge: map.max() as f64,
                report: evaluate(&otsu_threshold(&map), &small_truth, DEFAULT_ALPHA)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaComparison {
    pub original: Mask,
    pub projected: Mask,
    pub explained_variance: Vec<f64>,
}

impl PcaComparison {
    pub fn identical(&self) -> bool {
        self.original == self.projected
    }
}

/// Otsu-positive Median-EU sets on the three-region scene and on its
/// projection onto `components` principal components.
pub fn pca(components: usize) -> Result<PcaComparison> {
    let (cube, _) = synth_scene::<f64>(&three_region_scene())?;
    let config = median(MetricKind::Euclidean, 3);
    let model = pca_fit(&cube, components)?;
    let projected = pca_project(&cube, &model)?;
    Ok(PcaComparison {
        original: otsu_threshold(&edge_map(&cube, &config, None)?).mask,
        projected: otsu_threshold(&edge_map(&projected, &config, None)?).mask,
        explained_variance: model.explained_variance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterRow {
    pub seed: u64,
    /// Misassigned pixels of the unmasked run, over all pixels.
    pub plain_errors: usize,
    /// Misassigned pixels of the unmasked run, over pixels the LSS mask keeps.
    pub plain_errors_kept: usize,
    /// Misassigned pixels of the masked run (all of them kept).
    pub masked_errors: usize,
    pub masked_pixels: usize,
}

pub const CLUSTER_MAX_ITER: usize = 100;

/// k=2 k-means on the mixed strip scene with and without the Otsu-binarized
/// Median-EU mask, scored against each pixel's majority endmember.
pub fn clustering(seeds: &[u64]) -> Result<Vec<ClusterRow>> {
    let spec = strip_scene(2);
    let truth = spec.labels()?;
    let (cube, _) = synth_scene::<f32>(&spec)?;
    let mask = otsu_threshold(&edge_map(&cube, &median(MetricKind::Euclidean, 3), None)?).mask;
    seeds
        .iter()
        .map(|&seed| {
            let plain = kmeans_cluster(&cube, 2, None, seed, CLUSTER_MAX_ITER)?;
            let masked = kmeans_cluster(&cube, 2, Some(&mask), seed, CLUSTER_MAX_ITER)?;
            let restricted: Vec<i32> = plain
                .labels
                .iter()
                .zip(mask.bits())
                .map(|(&l, &m)| if m { MASKED } else { l })
                .collect();
            Ok(ClusterRow {
                seed,
                plain_errors: best_permutation_errors(&plain.labels, &truth),
                plain_errors_kept: best_permutation_errors(&restricted, &truth),
                masked_errors: best_permutation_errors(&masked.labels, &truth),
                masked_pixels: mask.count(),
            })
        })
        .collect()
}

pub fn clustering_csv(rows: &[ClusterRow]) -> String {
    let mut s = String::from("seed,plain_errors,plain_errors_kept,masked_errors,masked_pixels\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.seed, r.plain_errors, r.plain_errors_kept, r.masked_errors, r.masked_pixels
        );
    }
    s
}
