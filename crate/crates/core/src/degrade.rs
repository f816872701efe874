//! Controlled degradations: additive band noise and spatial block averaging.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Adds zero-mean Gaussian noise whose variance is drawn per band from
/// `U[0, max_variance]`. Band variances are drawn first (band order), then
/// noise per band in row-major pixel order. Values are not clipped.
pub fn add_gaussian_noise<T: Scalar>(cube: &HsiCube<T>, max_variance: f64, seed: u64) -> Result<HsiCube<T>> {
    if !(max_variance >= 0.0 && max_variance.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise variance bound must be finite and >= 0, got {max_variance}"
        )));
    }
    if max_variance == 0.0 {
        return Ok(cube.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigmas: Vec<f64> = (0..cube.bands())
        .map(|_| rng.random_range(0.0..=max_variance).sqrt())
        .collect();
    let bands = cube.bands();
    let mut data = cube.data().to_vec();
    for (b, &sigma) in sigmas.iter().enumerate() {
        for px in 0..cube.pixel_count() {
            let z: f64 = StandardNormal.sample(&mut rng);
            let v = &mut data[px * bands + b];
            *v = T::of(v.to_f64_lossless() + sigma * z);
        }
    }
    rebuild(cube, cube.rows(), cube.cols(), data)
}

/// Block mean over `factor x factor` pixels; trailing partial blocks are dropped.
pub fn downsample<T: Scalar>(cube: &HsiCube<T>, factor: usize) -> Result<HsiCube<T>> {
    if factor == 0 {
        return Err(Error::InvalidParameter("downsample factor must be positive".into()));
    }
    let (rows, cols, bands) = (cube.rows() / factor, cube.cols() / factor, cube.bands());
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter(format!(
            "factor {factor} leaves no pixels of a {}x{} cube",
            cube.rows(),
            cube.cols()
        )));
    }
    let area = (factor * factor) as f64;
    let mut data = Vec::with_capacity(rows * cols * bands);
    let mut acc = vec![0.0f64; bands];
    for r in 0..rows {
        for c in 0..cols {
            acc.iter_mut().for_each(|a| *a = 0.0);
            for rr in r * factor..(r + 1) * factor {
                for cc in c * factor..(c + 1) * factor {
                    for (a, v) in acc.iter_mut().zip(cube.spectrum(rr, cc)) {
                        *a += v.to_f64_lossless();
                    }
                }
            }
            data.extend(acc.iter().map(|&a| T::of(a / area)));
        }
    }
    rebuild(cube, rows, cols, data)
}

fn rebuild<T: Scalar>(like: &HsiCube<T>, rows: usize, cols: usize, data: Vec<T>) -> Result<HsiCube<T>> {
    let mut out = HsiCube::new(rows, cols, like.bands(), data)?.with_interleave(like.interleave());
    if let Some(wl) = like.wavelengths() {
        out = out.with_wavelengths(wl.to_vec())?;
    }
    Ok(out)
}
