//! Seeded synthetic scenes with known region boundaries.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::raster::{GroundTruthEdges, Mask};
use crate::scalar::Scalar;

/// Pixel-set geometry. Coordinates are `(row, col)`; a pixel belongs to a
/// shape when its center `(row + 0.5, col + 0.5)` does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegionShape {
    /// Half-open pixel rectangle `[row0, row1) x [col0, col1)`.
    Rect {
        row0: usize,
        col0: usize,
        row1: usize,
        col1: usize,
    },
    /// Simple polygon, even-odd rule.
    Polygon { vertices: Vec<[f64; 2]> },
    /// `a * row + b * col >= c`.
    HalfPlane { a: f64, b: f64, c: f64 },
    Everything,
}

impl RegionShape {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        let (y, x) = (row as f64 + 0.5, col as f64 + 0.5);
        match self {
            RegionShape::Rect { row0, col0, row1, col1 } => {
                (*row0..*row1).contains(&row) && (*col0..*col1).contains(&col)
            }
            RegionShape::Polygon { vertices } => {
                let mut inside = false;
                let n = vertices.len();
                for i in 0..n {
                    let [y0, x0] = vertices[i];
                    let [y1, x1] = vertices[(i + 1) % n];
                    if (y0 > y) != (y1 > y) && x < x0 + (y - y0) * (x1 - x0) / (y1 - y0) {
                        inside = !inside;
                    }
                }
                inside
            }
            RegionShape::HalfPlane { a, b, c } => a * y + b * x >= *c,
            RegionShape::Everything => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub shape: RegionShape,
    pub endmember: Vec<f64>,
}

/// Scene description. Each pixel belongs to the first region whose shape
/// contains it; every pixel must be covered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub rows: usize,
    pub cols: usize,
    pub bands: usize,
    pub regions: Vec<Region>,
    /// Pixels within this Manhattan distance of a foreign region are mixed.
    #[serde(default)]
    pub boundary_mix_width: usize,
    #[serde(default)]
    pub seed: u64,
    /// Standard deviation of i.i.d. Gaussian texture added to every value.
    #[serde(default)]
    pub jitter: f64,
    #[serde(default)]
    pub wavelengths: Option<Vec<f64>>,
}

impl SceneSpec {
    /// Two regions split by `a * row + b * col >= c` (second region on the `>=` side).
    pub fn two_region(
        rows: usize,
        cols: usize,
        first: Vec<f64>,
        second: Vec<f64>,
        boundary: (f64, f64, f64),
        mix_width: usize,
    ) -> Self {
        let (a, b, c) = boundary;
        SceneSpec {
            rows,
            cols,
            bands: first.len(),
            regions: vec![
                Region {
                    shape: RegionShape::HalfPlane { a, b, c },
                    endmember: second,
                },
                Region {
                    shape: RegionShape::Everything,
                    endmember: first,
                },
            ],
            boundary_mix_width: mix_width,
            seed: 0,
            jitter: 0.0,
            wavelengths: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 || self.bands == 0 {
            return Err(Error::InvalidScene(format!(
                "scene dimensions must be positive, got {}x{}x{}",
                self.rows, self.cols, self.bands
            )));
        }
        if self.regions.is_empty() {
            return Err(Error::InvalidScene("scene has no regions".into()));
        }
        for (i, region) in self.regions.iter().enumerate() {
            if region.endmember.len() != self.bands {
                return Err(Error::InvalidScene(format!(
                    "region {i} endmember has {} bands, scene has {}",
                    region.endmember.len(),
                    self.bands
                )));
            }
            if region.endmember.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidScene(format!("region {i} endmember is not finite")));
            }
            if let RegionShape::Polygon { vertices } = &region.shape {
                if vertices.len() < 3 {
                    return Err(Error::InvalidScene(format!("region {i} polygon has fewer than 3 vertices")));
                }
            }
            for (j, other) in self.regions[..i].iter().enumerate() {
                if other.endmember == region.endmember {
                    return Err(Error::InvalidScene(format!("regions {j} and {i} share an endmember")));
                }
            }
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return Err(Error::InvalidScene(format!("jitter must be >= 0, got {}", self.jitter)));
        }
        Ok(())
    }

    /// Region index of every pixel, row-major.
    pub fn labels(&self) -> Result<Vec<usize>> {
        self.validate()?;
        let mut labels = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let label = self
                    .regions
                    .iter()
                    .position(|reg| reg.shape.contains(r, c))
                    .ok_or_else(|| Error::InvalidScene(format!("pixel ({r}, {c}) is not covered by any region")))?;
                labels.push(label);
            }
        }
        let mut seen = vec![false; self.regions.len()];
        labels.iter().for_each(|&l| seen[l] = true);
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidScene(format!("region {i} covers no pixels")));
        }
        Ok(labels)
    }
}

/// Pixels with a 4-neighbor in another region.
pub fn boundary_mask(rows: usize, cols: usize, labels: &[usize]) -> Mask {
    Mask::from_fn(rows, cols, |r, c| {
        let l = labels[r * cols + c];
        (r > 0 && labels[(r - 1) * cols + c] != l)
            || (r + 1 < rows && labels[(r + 1) * cols + c] != l)
            || (c > 0 && labels[r * cols + c - 1] != l)
            || (c + 1 < cols && labels[r * cols + c + 1] != l)
    })
}

/// Nearest foreign pixel within Manhattan radius `w`: `(distance, region)`,
/// ties going to the lower region index.
fn nearest_foreign(rows: usize, cols: usize, labels: &[usize], r: usize, c: usize, w: usize) -> Option<(usize, usize)> {
    let own = labels[r * cols + c];
    let mut best: Option<(usize, usize)> = None;
    for rr in r.saturating_sub(w)..(r + w + 1).min(rows) {
        let dr = rr.abs_diff(r);
        let reach = w - dr;
        for cc in c.saturating_sub(reach)..(c + reach + 1).min(cols) {
            let l = labels[rr * cols + cc];
            if l != own {
                let cand = (dr + cc.abs_diff(c), l);
                if best.is_none_or(|b| cand < b) {
                    best = Some(cand);
                }
            }
        }
    }
    best
}

/// Renders a scene and its ground-truth edges.
///
/// A pixel at Manhattan distance `d <= w` from its nearest foreign region
/// (`w` = mix width) takes a fraction `0.5 - (d - 0.5) / (2w)` of that
/// region's endmember, so the mixing ramp is symmetric across the border.
pub fn synth_scene<T: Scalar>(spec: &SceneSpec) -> Result<(HsiCube<T>, GroundTruthEdges)> {
    let labels = spec.labels()?;
    let (rows, cols, bands) = (spec.rows, spec.cols, spec.bands);
    let w = spec.boundary_mix_width;
    let mut data = Vec::with_capacity(rows * cols * bands);
    for r in 0..rows {
        for c in 0..cols {
            let own = &spec.regions[labels[r * cols + c]].endmember;
            let mix = if w > 0 { nearest_foreign(rows, cols, &labels, r, c, w) } else { None };
            match mix {
                Some((d, other)) => {
                    let f = 0.5 - (d as f64 - 0.5) / (2.0 * w as f64);
                    let foreign = &spec.regions[other].endmember;
                    data.extend(own.iter().zip(foreign).map(|(&a, &b)| T::of((1.0 - f) * a + f * b)));
                }
                None => data.extend(own.iter().map(|&a| T::of(a))),
            }
        }
    }
    if spec.jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal = Normal::new(0.0, spec.jitter).map_err(|e| Error::InvalidScene(e.to_string()))?;
        for v in data.iter_mut() {
            *v = *v + T::of(normal.sample(&mut rng));
        }
    }
    let mut cube = HsiCube::new(rows, cols, bands, data)?;
    if let Some(wl) = &spec.wavelengths {
        cube = cube.with_wavelengths(wl.clone())?;
    }
    Ok((cube, GroundTruthEdges::new(boundary_mask(rows, cols, &labels))))
}
