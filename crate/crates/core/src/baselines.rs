//! Multichannel gradient and Sobel edge detectors for comparison.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cube::HsiCube;
use crate::error::{Error, Result};
use crate::raster::EdgeMap;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    GradX,
    GradY,
    GradXyMean,
    GradUp,
    GradDown,
    Grad,
    GradUdMean,
    GradAll6,
    SobelX,
    SobelY,
    SobelXy,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 11] = [
        BaselineKind::GradX,
        BaselineKind::GradY,
        BaselineKind::GradXyMean,
        BaselineKind::GradUp,
        BaselineKind::GradDown,
        BaselineKind::Grad,
        BaselineKind::GradUdMean,
        BaselineKind::GradAll6,
        BaselineKind::SobelX,
        BaselineKind::SobelY,
        BaselineKind::SobelXy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::GradX => "grad-x",
            BaselineKind::GradY => "grad-y",
            BaselineKind::GradXyMean => "grad-xy-mean",
            BaselineKind::GradUp => "grad-up",
            BaselineKind::GradDown => "grad-down",
            BaselineKind::Grad => "grad",
            BaselineKind::GradUdMean => "grad-ud-mean",
            BaselineKind::GradAll6 => "grad-all6",
            BaselineKind::SobelX => "sobel-x",
            BaselineKind::SobelY => "sobel-y",
            BaselineKind::SobelXy => "sobelxy",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        let s = if s == "sobel-xy" { "sobelxy".to_string() } else { s };
        BaselineKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = BaselineKind::ALL.iter().map(|k| k.name()).collect();
            Error::Parse(format!("unknown baseline '{s}' (expected one of: {})", names.join(", ")))
        })
    }
}

const SOBEL: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];

struct Neighborhood<'a, T> {
    cube: &'a HsiCube<T>,
    i: usize,
    j: usize,
}

impl<'a, T: Scalar> Neighborhood<'a, T> {
    #[inline]
    fn at(&self, du: isize, dv: isize) -> &'a [T] {
        let r = (self.i as isize + du).clamp(0, self.cube.rows() as isize - 1) as usize;
        let c = (self.j as isize + dv).clamp(0, self.cube.cols() as isize - 1) as usize;
        self.cube.spectrum(r, c)
    }

    /// Half the Euclidean distance between the spectra at two offsets.
    fn half_diff(&self, a: (isize, isize), b: (isize, isize)) -> T {
        let (sa, sb) = (self.at(a.0, a.1), self.at(b.0, b.1));
        sa.iter()
            .zip(sb)
            .map(|(&x, &y)| (x - y) * (x - y))
            .fold(T::zero(), |acc, v| acc + v)
            .sqrt()
            / T::of(2.0)
    }

    fn gx(&self) -> T {
        self.half_diff((0, 1), (0, -1))
    }

    fn gy(&self) -> T {
        self.half_diff((1, 0), (-1, 0))
    }

    fn gup(&self) -> T {
        self.half_diff((-1, 1), (1, -1))
    }

    fn gdown(&self) -> T {
        self.half_diff((1, 1), (-1, -1))
    }

    /// Band-wise Sobel response norm; `transpose` selects the row derivative.
    fn sobel(&self, transpose: bool) -> T {
        let mut acc = T::zero();
        for b in 0..self.cube.bands() {
            let mut s = T::zero();
            for (u, row) in SOBEL.iter().enumerate() {
                for (v, _) in row.iter().enumerate() {
                    let w = if transpose { SOBEL[v][u] } else { SOBEL[u][v] };
                    if w != 0.0 {
                        s = s + T::of(w) * self.at(u as isize - 1, v as isize - 1)[b];
                    }
                }
            }
            acc = acc + s * s;
        }
        acc.sqrt()
    }

    fn value(&self, kind: BaselineKind) -> T {
        let two = T::of(2.0);
        match kind {
            BaselineKind::GradX => self.gx(),
            BaselineKind::GradY => self.gy(),
            BaselineKind::GradXyMean => (self.gx() + self.gy()) / two,
            BaselineKind::GradUp => self.gup(),
            BaselineKind::GradDown => self.gdown(),
            BaselineKind::Grad => self.gx().hypot(self.gy()),
            BaselineKind::GradUdMean => (self.gup() + self.gdown()) / two,
            BaselineKind::GradAll6 => (two * self.gx() + two * self.gy() + self.gup() + self.gdown()) / T::of(6.0),
            BaselineKind::SobelX => self.sobel(false),
            BaselineKind::SobelY => self.sobel(true),
            BaselineKind::SobelXy => {
                let (x, y) = (self.sobel(false), self.sobel(true));
                (x * x + y * y).sqrt()
            }
        }
    }
}

/// Edge strength of every pixel under a gradient-family detector, with
/// replicated borders. `x` runs along columns, `y` along rows; "up" pairs
/// the upper-right and lower-left neighbors, "down" the lower-right and
/// upper-left ones.
pub fn baseline_edge_map<T: Scalar>(cube: &HsiCube<T>, kind: BaselineKind) -> Result<EdgeMap<T>> {
    if cube.rows() < 3 || cube.cols() < 3 {
        return Err(Error::InvalidParameter(format!(
            "baseline detectors need at least 3x3 pixels, got {}x{}",
            cube.rows(),
            cube.cols()
        )));
    }
    let cols = cube.cols();
    let mut out = vec![T::zero(); cube.pixel_count()];
    out.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
        for (j, y) in row.iter_mut().enumerate() {
            *y = Neighborhood { cube, i, j }.value(kind);
        }
    });
    EdgeMap::new(cube.rows(), cols, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for k in BaselineKind::ALL {
            assert_eq!(k.name().parse::<BaselineKind>().unwrap(), k);
        }
        assert_eq!("SOBEL_XY".parse::<BaselineKind>().unwrap(), BaselineKind::SobelXy);
        assert!("laplace".parse::<BaselineKind>().is_err());
    }

    #[test]
    fn constant_cube_is_flat() {
        let cube = HsiCube::from_fn(4, 5, 3, |_, _, b| b as f64 + 0.5).unwrap();
        for k in BaselineKind::ALL {
            assert!(baseline_edge_map(&cube, k).unwrap().values().iter().all(|&v| v == 0.0), "{k}");
        }
    }

    #[test]
    fn too_small() {
        let cube = HsiCube::from_fn(2, 5, 1, |_, _, _| 0.0f32).unwrap();
        assert!(baseline_edge_map(&cube, BaselineKind::GradX).is_err());
    }

    #[test]
    fn vertical_step() {
        let cube = HsiCube::from_fn(6, 6, 2, |_, c, _| if c < 3 { 0.0 } else { 2.0 }).unwrap();
        let gx = baseline_edge_map(&cube, BaselineKind::GradX).unwrap();
        let gy = baseline_edge_map(&cube, BaselineKind::GradY).unwrap();
        // |(2,2) - (0,0)| / 2 = sqrt(2)
        assert_eq!(gx.get(1, 2), 2f64.sqrt());
        assert_eq!(gx.get(1, 3), 2f64.sqrt());
        assert_eq!(gx.get(1, 0), 0.0);
        assert!(gy.values().iter().all(|&v| v == 0.0));
        let sx = baseline_edge_map(&cube, BaselineKind::SobelX).unwrap();
        assert_eq!(sx.get(2, 2), (2.0f64 * 64.0).sqrt());
    }
}
