//! Spectral distance measures.
//!
//! Every measure is returned as a non-negative distance where 0 means
//! identical: cosine similarity and Pearson correlation are reported as
//! `1 - similarity`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    /// L2 norm.
    Euclidean,
    /// L1 norm.
    Manhattan,
    /// L_k "norm" with 0 < k < 1.
    Fractional,
    /// L∞ norm.
    Chebyshev,
    /// 1 - cosine similarity.
    Cosine,
    /// 1 - Pearson correlation.
    Correlation,
    /// Symmetric relative entropy of sum-normalized spectra.
    Sid,
    /// 1-D earth mover's distance over band index.
    Emd,
}

impl MetricKind {
    pub const ALL: [MetricKind; 8] = [
        MetricKind::Euclidean,
        MetricKind::Manhattan,
        MetricKind::Fractional,
        MetricKind::Chebyshev,
        MetricKind::Cosine,
        MetricKind::Correlation,
        MetricKind::Sid,
        MetricKind::Emd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "eu",
            MetricKind::Manhattan => "man",
            MetricKind::Fractional => "fract",
            MetricKind::Chebyshev => "che",
            MetricKind::Cosine => "cos",
            MetricKind::Correlation => "cor",
            MetricKind::Sid => "sid",
            MetricKind::Emd => "emd",
        }
    }

    /// Minimum spectrum length the measure is defined for.
    pub fn min_len(self) -> usize {
        match self {
            MetricKind::Cosine | MetricKind::Correlation => 2,
            _ => 1,
        }
    }

    /// Whether the value is unchanged by permuting band order.
    pub fn band_permutation_invariant(self) -> bool {
        self != MetricKind::Emd
    }
}

/// Comma-separated list of accepted metric names, for usage messages.
pub fn metric_names() -> String {
    MetricKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

pub const DEFAULT_FRACT_K: f64 = 0.5;
pub const DEFAULT_SID_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Norm order for [`MetricKind::Fractional`].
    pub k_exponent: f64,
    /// Probability floor for [`MetricKind::Sid`].
    pub epsilon: f64,
}

impl MetricSpec {
    pub fn new(kind: MetricKind) -> Self {
        MetricSpec {
            kind,
            k_exponent: DEFAULT_FRACT_K,
            epsilon: DEFAULT_SID_EPSILON,
        }
    }

    pub fn fractional(k: f64) -> Result<Self> {
        let spec = MetricSpec {
            k_exponent: k,
            ..MetricSpec::new(MetricKind::Fractional)
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == MetricKind::Fractional && !(self.k_exponent > 0.0 && self.k_exponent < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "fractional distance needs 0 < k < 1, got {}",
                self.k_exponent
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        Ok(())
    }
}

impl From<MetricKind> for MetricSpec {
    fn from(kind: MetricKind) -> Self {
        MetricSpec::new(kind)
    }
}

impl fmt::Display for MetricSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MetricKind::Fractional => write!(f, "fract:{}", self.k_exponent),
            MetricKind::Sid if self.epsilon != DEFAULT_SID_EPSILON => write!(f, "sid:{}", self.epsilon),
            kind => f.write_str(kind.name()),
        }
    }
}

/// Grammar: `name[:param]`, where the parameter is `k` for `fract` and the
/// probability floor for `sid`.
impl FromStr for MetricSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s.as_str(), None),
        };
        let kind = MetricKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::Parse(format!("unknown metric '{name}' (expected one of: {})", metric_names())))?;
        let mut spec = MetricSpec::new(kind);
        if let Some(p) = param {
            let value: f64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad parameter '{p}' for metric '{name}'")))?;
            match kind {
                MetricKind::Fractional => spec.k_exponent = value,
                MetricKind::Sid => spec.epsilon = value,
                _ => return Err(Error::Parse(format!("metric '{name}' takes no parameter"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Distance between two spectra under `spec`.
pub fn distance<T: Scalar>(a: &[T], b: &[T], spec: &MetricSpec) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < spec.kind.min_len() {
        return Err(Error::InvalidParameter(format!(
            "{} needs spectra of length >= {}, got {}",
            spec.kind.name(),
            spec.kind.min_len(),
            a.len()
        )));
    }
    let d = match spec.kind {
        MetricKind::Euclidean => a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x - y) * (x - y))
            .fold(T::zero(), |acc, v| acc + v)
            .sqrt(),
        MetricKind::Manhattan => a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), |acc, v| acc + v),
        MetricKind::Fractional => {
            let k = T::of(spec.k_exponent);
            a.iter()
                .zip(b)
                .map(|(&x, &y)| (x - y).abs().powf(k))
                .fold(T::zero(), |acc, v| acc + v)
                .powf(T::one() / k)
        }
        MetricKind::Chebyshev => a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max),
        MetricKind::Cosine => cosine(a, b)?,
        MetricKind::Correlation => correlation(a, b)?,
        MetricKind::Sid => sid(a, b, T::of(spec.epsilon))?,
        MetricKind::Emd => emd(a, b)?,
    };
    // rounding can leave e.g. 1 - cos(a, a) a hair below zero
    Ok(d.max(T::zero()))
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).fold(T::zero(), |acc, v| acc + v)
}

fn cosine<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    let (na, nb) = (dot(a, a).sqrt(), dot(b, b).sqrt());
    if na == T::zero() || nb == T::zero() {
        return Err(Error::Degenerate("cosine distance of a zero-norm spectrum".into()));
    }
    let cos = (dot(a, b) / (na * nb)).min(T::one()).max(-T::one());
    Ok(T::one() - cos)
}

fn correlation<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    let n = T::of(a.len() as f64);
    let ma = a.iter().copied().fold(T::zero(), |acc, v| acc + v) / n;
    let mb = b.iter().copied().fold(T::zero(), |acc, v| acc + v) / n;
    let (mut sab, mut saa, mut sbb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab = sab + dx * dy;
        saa = saa + dx * dx;
        sbb = sbb + dy * dy;
    }
    if saa == T::zero() || sbb == T::zero() {
        return Err(Error::Degenerate("correlation distance of a constant spectrum".into()));
    }
    let r = (sab / (saa.sqrt() * sbb.sqrt())).min(T::one()).max(-T::one());
    Ok(T::one() - r)
}

/// Sum of a non-negative spectrum; errors on negative components or an all-zero vector.
fn probability_mass<T: Scalar>(v: &[T], what: &str) -> Result<T> {
    if v.iter().any(|&x| x < T::zero()) {
        return Err(Error::Degenerate(format!("{what} needs non-negative spectra")));
    }
    let total = v.iter().copied().fold(T::zero(), |acc, x| acc + x);
    if total <= T::zero() {
        return Err(Error::Degenerate(format!("{what} of an all-zero spectrum")));
    }
    Ok(total)
}

fn sid<T: Scalar>(a: &[T], b: &[T], eps: T) -> Result<T> {
    let (sa, sb) = (probability_mass(a, "SID")?, probability_mass(b, "SID")?);
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let p = (x / sa).max(eps);
        let q = (y / sb).max(eps);
        acc = acc + (p - q) * (p.ln() - q.ln());
    }
    Ok(acc)
}

fn emd<T: Scalar>(a: &[T], b: &[T]) -> Result<T> {
    let (sa, sb) = (probability_mass(a, "EMD")?, probability_mass(b, "EMD")?);
    let (mut ca, mut cb, mut acc) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        ca = ca + x / sa;
        cb = cb + y / sb;
        acc = acc + (ca - cb).abs();
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(kind: MetricKind, a: &[f64], b: &[f64]) -> f64 {
        distance(a, b, &MetricSpec::new(kind)).unwrap()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(d(MetricKind::Euclidean, &[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(d(MetricKind::Euclidean, &[0.0, 3.0], &[4.0, 0.0]), 5.0);
        assert_abs_diff_eq!(d(MetricKind::Fractional, &[0.0, 0.0], &[1.0, 1.0]), 4.0, epsilon = 1e-12);
        assert_eq!(d(MetricKind::Chebyshev, &[1.0, 5.0], &[4.0, 9.0]), 4.0);
        assert_abs_diff_eq!(d(MetricKind::Cosine, &[1.0, 0.0], &[0.0, 1.0]), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d(MetricKind::Correlation, &[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), 2.0, epsilon = 1e-15);
        assert_eq!(d(MetricKind::Sid, &[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]), 0.0);
        assert_abs_diff_eq!(d(MetricKind::Emd, &[1.0, 0.0], &[0.0, 1.0]), 1.0, epsilon = 1e-15);
        assert_eq!(d(MetricKind::Manhattan, &[1.0, -1.0], &[0.0, 1.0]), 3.0);
    }

    #[test]
    fn error_paths() {
        let eu = MetricSpec::new(MetricKind::Euclidean);
        assert!(matches!(distance(&[1.0], &[1.0, 2.0], &eu), Err(Error::LengthMismatch(1, 2))));
        let cos = MetricSpec::new(MetricKind::Cosine);
        assert!(distance(&[0.0, 0.0], &[1.0, 2.0], &cos).is_err());
        assert!(distance(&[1.0], &[1.0], &cos).is_err());
        let cor = MetricSpec::new(MetricKind::Correlation);
        assert!(distance(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0], &cor).is_err());
        let sid = MetricSpec::new(MetricKind::Sid);
        assert!(distance(&[0.0, 0.0], &[1.0, 2.0], &sid).is_err());
        assert!(distance(&[-1.0, 2.0], &[1.0, 2.0], &sid).is_err());
        let emd = MetricSpec::new(MetricKind::Emd);
        assert!(distance(&[0.0, 0.0], &[1.0, 2.0], &emd).is_err());
    }

    #[test]
    fn sid_handles_zero_components() {
        let v = d(MetricKind::Sid, &[1.0, 0.0], &[0.5, 0.5]);
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn parse_grammar() {
        assert_eq!("EU".parse::<MetricSpec>().unwrap().kind, MetricKind::Euclidean);
        let f: MetricSpec = "fract:0.25".parse().unwrap();
        assert_eq!((f.kind, f.k_exponent), (MetricKind::Fractional, 0.25));
        assert_eq!("fract".parse::<MetricSpec>().unwrap().k_exponent, 0.5);
        assert_eq!("sid:1e-9".parse::<MetricSpec>().unwrap().epsilon, 1e-9);
        assert!("fract:1.5".parse::<MetricSpec>().is_err());
        assert!("eu:2".parse::<MetricSpec>().is_err());
        let err = "bogus".parse::<MetricSpec>().unwrap_err().to_string();
        assert!(err.contains("fract") && err.contains("emd"), "{err}");
        for kind in MetricKind::ALL {
            let spec = MetricSpec::new(kind);
            assert_eq!(spec.to_string().parse::<MetricSpec>().unwrap(), spec);
        }
    }

    #[test]
    fn single_band_norms_agree() {
        for kind in [MetricKind::Euclidean, MetricKind::Manhattan, MetricKind::Chebyshev, MetricKind::Fractional] {
            assert_abs_diff_eq!(d(kind, &[0.75], &[-1.5]), 2.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn generic_over_f32() {
        let v = distance(&[0.0f32, 3.0], &[4.0, 0.0], &MetricSpec::new(MetricKind::Euclidean)).unwrap();
        assert_eq!(v, 5.0f32);
    }
}
