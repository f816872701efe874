//! Seeded k-means over pixel spectra, optionally skipping masked (edge) pixels.

use std::collections::VecDeque;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cube::{HsiCube, Spectrum};
use crate::error::{Error, Result};
use crate::raster::Mask;
use crate::scalar::Scalar;

/// Label of a pixel excluded from clustering.
pub const MASKED: i32 = -1;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMap<T> {
    pub rows: usize,
    pub cols: usize,
    pub k: usize,
    /// Row-major labels in `0..k`, or [`MASKED`].
    pub labels: Vec<i32>,
    /// Pixels excluded from clustering.
    pub masked: Mask,
    pub centroids: Vec<Spectrum<T>>,
    /// Within-cluster sum of squares after every assignment step.
    pub objective_history: Vec<f64>,
    /// Number of centroid updates performed.
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> ClusterMap<T> {
    pub fn label(&self, row: usize, col: usize) -> i32 {
        self.labels[row * self.cols + col]
    }

    /// Gives each masked pixel the label of the closest unmasked pixel found
    /// by a breadth-first sweep over 4-neighbors.
    pub fn fill_masked(&mut self) {
        let (rows, cols) = (self.rows, self.cols);
        let mut queue: VecDeque<usize> = (0..rows * cols).filter(|&i| self.labels[i] != MASKED).collect();
        while let Some(i) = queue.pop_front() {
            let (r, c) = (i / cols, i % cols);
            let neighbors = [
                (r > 0).then(|| i - cols),
                (r + 1 < rows).then(|| i + cols),
                (c > 0).then(|| i - 1),
                (c + 1 < cols).then(|| i + 1),
            ];
            for n in neighbors.into_iter().flatten() {
                if self.labels[n] == MASKED {
                    self.labels[n] = self.labels[i];
                    queue.push_back(n);
                }
            }
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid (lowest index on ties) and its squared distance.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn kmeans_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<f64>>> {
    let mut centroids = vec![points[rng.random_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| squared_distance(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        if !(total > 0.0) {
            return Err(Error::Degenerate(format!(
                "fewer than {k} distinct spectra among the pixels to cluster"
            )));
        }
        let target = rng.random::<f64>() * total;
        let mut cumulative = 0.0;
        let mut pick = None;
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 {
                cumulative += d;
                pick = Some(i);
                if cumulative > target {
                    break;
                }
            }
        }
        let chosen = points[pick.expect("positive total has a positive term")].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &chosen));
        }
        centroids.push(chosen);
    }
    Ok(centroids)
}

fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let nearest: Vec<(usize, f64)> = points.par_iter().map(|p| nearest(p, centroids)).collect();
    let objective = nearest.iter().map(|&(_, d)| d).sum();
    (nearest.into_iter().map(|(c, _)| c).collect(), objective)
}

fn update(points: &[Vec<f64>], labels: &[usize], centroids: &mut [Vec<f64>]) {
    let bands = points[0].len();
    let mut sums = vec![vec![0.0f64; bands]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    for ((centroid, sum), count) in centroids.iter_mut().zip(sums).zip(counts) {
        // an emptied cluster keeps its previous centroid
        if count > 0 {
            *centroid = sum.into_iter().map(|s| s / count as f64).collect();
        }
    }
}

/// Lloyd's k-means with k-means++ seeding on the spectra of unmasked pixels.
///
/// Stops when an assignment step changes no label or after `max_iter`
/// centroid updates. Masked pixels are labelled [`MASKED`].
pub fn kmeans_cluster<T: Scalar>(
    cube: &HsiCube<T>,
    k: usize,
    mask: Option<&Mask>,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterMap<T>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k must be at least 2, got {k}")));
    }
    let masked = match mask {
        Some(m) => {
            if m.rows() != cube.rows() || m.cols() != cube.cols() {
                return Err(Error::DimensionMismatch(format!(
                    "mask is {}x{}, cube is {}x{}",
                    m.rows(),
                    m.cols(),
                    cube.rows(),
                    cube.cols()
                )));
            }
            m.clone()
        }
        None => Mask::empty(cube.rows(), cube.cols()),
    };
    let active: Vec<usize> = (0..cube.pixel_count()).filter(|&i| !masked.bits()[i]).collect();
    if active.len() < k {
        return Err(Error::InvalidParameter(format!(
            "{} unmasked pixels cannot form {k} clusters",
            active.len()
        )));
    }
    let points: Vec<Vec<f64>> = active
        .iter()
        .map(|&i| cube.pixel(i).iter().map(|v| v.to_f64_lossless()).collect())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus(&points, k, &mut rng)?;
    let (mut labels, objective) = assign(&points, &centroids);
    let mut history = vec![objective];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        update(&points, &labels, &mut centroids);
        iterations += 1;
        let (next, objective) = assign(&points, &centroids);
        history.push(objective);
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
    }

    let mut out = vec![MASKED; cube.pixel_count()];
    for (&i, &l) in active.iter().zip(&labels) {
        out[i] = l as i32;
    }
    Ok(ClusterMap {
        rows: cube.rows(),
        cols: cube.cols(),
        k,
        labels: out,
        masked,
        centroids: centroids
            .into_iter()
            .map(|c| Spectrum::new(c.into_iter().map(T::of).collect()))
            .collect::<Result<_>>()?,
        objective_history: history,
        iterations,
        converged,
    })
}

/// Pixels (ignoring [`MASKED`]) whose cluster disagrees with `truth` under
/// the cluster-to-class relabeling that minimizes disagreements.
pub fn best_permutation_errors(labels: &[i32], truth: &[usize]) -> usize {
    let clusters = labels.iter().map(|&l| l + 1).max().unwrap_or(0).max(0) as usize;
    let classes = truth.iter().map(|&t| t + 1).max().unwrap_or(0);
    let n = clusters.max(classes);
    let mut confusion = vec![vec![0usize; n]; n];
    let mut total = 0;
    for (&l, &t) in labels.iter().zip(truth) {
        if l != MASKED {
            confusion[l as usize][t] += 1;
            total += 1;
        }
    }
    let best_agree = (0..n)
        .permutations(n)
        .map(|perm| perm.iter().enumerate().map(|(c, &t)| confusion[c][t]).sum::<usize>())
        .max()
        .unwrap_or(0);
    total - best_agree
}
