//! Principal component projection of pixel spectra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::cube::{HsiCube, Spectrum};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel<T> {
    pub mean: Spectrum<T>,
    /// `p x bands`, row-major; rows are orthonormal principal directions.
    pub components: Vec<T>,
    /// Eigenvalue of each retained component, non-increasing.
    pub explained_variance: Vec<T>,
}

impl<T: Scalar> PcaModel<T> {
    pub fn n_components(&self) -> usize {
        self.explained_variance.len()
    }

    pub fn bands(&self) -> usize {
        self.mean.len()
    }

    pub fn component(&self, i: usize) -> &[T] {
        let n = self.bands();
        &self.components[i * n..(i + 1) * n]
    }
}

/// Fits `p` components from the sample band covariance (divisor `n - 1`)
/// of all pixel spectra. Each component's largest-magnitude element is made
/// positive.
pub fn pca_fit<T: Scalar>(cube: &HsiCube<T>, p: usize) -> Result<PcaModel<T>> {
    let (n, bands) = (cube.pixel_count(), cube.bands());
    if p == 0 || p > bands {
        return Err(Error::InvalidParameter(format!(
            "component count must be in 1..={bands}, got {p}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("PCA needs at least 2 pixels".into()));
    }
    let mut mean = vec![0.0f64; bands];
    for px in 0..n {
        for (m, v) in mean.iter_mut().zip(cube.pixel(px)) {
            *m += v.to_f64_lossless();
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = DMatrix::<f64>::zeros(bands, bands);
    let mut centered = vec![0.0f64; bands];
    for px in 0..n {
        for ((c, v), m) in centered.iter_mut().zip(cube.pixel(px)).zip(&mean) {
            *c = v.to_f64_lossless() - m;
        }
        for a in 0..bands {
            let ca = centered[a];
            for b in a..bands {
                cov[(a, b)] += ca * centered[b];
            }
        }
    }
    for a in 0..bands {
        for b in a..bands {
            let v = cov[(a, b)] / (n - 1) as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..bands).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(p * bands);
    let mut explained = Vec::with_capacity(p);
    for &idx in order.iter().take(p) {
        let col = eig.eigenvectors.column(idx);
        let pivot = col.iter().copied().fold(0.0f64, |best, v| if v.abs() > best.abs() { v } else { best });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        components.extend(col.iter().map(|&v| T::of(sign * v)));
        explained.push(T::of(eig.eigenvalues[idx].max(0.0)));
    }
    Ok(PcaModel {
        mean: Spectrum::new(mean.into_iter().map(T::of).collect())?,
        components,
        explained_variance: explained,
    })
}

/// `(spectrum - mean) . components^T` for every pixel.
pub fn pca_project<T: Scalar>(cube: &HsiCube<T>, model: &PcaModel<T>) -> Result<HsiCube<T>> {
    let (bands, p) = (model.bands(), model.n_components());
    if cube.bands() != bands {
        return Err(Error::DimensionMismatch(format!(
            "model fitted on {bands} bands, cube has {}",
            cube.bands()
        )));
    }
    let mut data = Vec::with_capacity(cube.pixel_count() * p);
    for px in 0..cube.pixel_count() {
        let s = cube.pixel(px);
        for i in 0..p {
            let y: f64 = model
                .component(i)
                .iter()
                .zip(s)
                .zip(model.mean.iter())
                .map(|((&w, &x), &m)| w.to_f64_lossless() * (x.to_f64_lossless() - m.to_f64_lossless()))
                .sum();
            data.push(T::of(y));
        }
    }
    HsiCube::new(cube.rows(), cube.cols(), p, data)
}

/// Maps projected spectra back to band space: `mean + y . components`.
pub fn pca_backproject<T: Scalar>(projected: &HsiCube<T>, model: &PcaModel<T>) -> Result<HsiCube<T>> {
    let (bands, p) = (model.bands(), model.n_components());
    if projected.bands() != p {
        return Err(Error::DimensionMismatch(format!(
            "model has {p} components, cube has {} bands",
            projected.bands()
        )));
    }
    let mut data = Vec::with_capacity(projected.pixel_count() * bands);
    for px in 0..projected.pixel_count() {
        let y = projected.pixel(px);
        for b in 0..bands {
            let v: f64 = model.mean[b].to_f64_lossless()
                + (0..p)
                    .map(|i| y[i].to_f64_lossless() * model.component(i)[b].to_f64_lossless())
                    .sum::<f64>();
            data.push(T::of(v));
        }
    }
    HsiCube::new(projected.rows(), projected.cols(), bands, data)
}
