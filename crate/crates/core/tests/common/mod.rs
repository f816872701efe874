//! Reference implementations used as test oracles. They are written
//! straight from the textbook definitions and share no code with the crate
//! beyond the types they read.
#![allow(dead_code)]

use lss_core::{distance, HsiCube, LssConfig, Padding};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cube(rng: &mut impl Rng, rows: usize, cols: usize, bands: usize) -> HsiCube<f64> {
    HsiCube::from_fn(rows, cols, bands, |_, _, _| rng.random_range(0.01..1.0)).unwrap()
}

/// Relative comparison; references below 1e-6 in magnitude are compared
/// against 1e-6 so that exact zeros do not demand exact zeros back.
pub fn rel_close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1e-6)
}

pub mod metric_oracle {
    pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += (a[i] - b[i]).powi(2);
        }
        s.sqrt()
    }

    pub fn minkowski(a: &[f64], b: &[f64], k: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += (a[i] - b[i]).abs().powf(k);
        }
        s.powf(1.0 / k)
    }

    pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..a.len() {
            m = m.max((a[i] - b[i]).abs());
        }
        m
    }

    pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
        let ab: f64 = (0..a.len()).map(|i| a[i] * b[i]).sum();
        let aa: f64 = (0..a.len()).map(|i| a[i] * a[i]).sum();
        let bb: f64 = (0..a.len()).map(|i| b[i] * b[i]).sum();
        1.0 - ab / (aa.sqrt() * bb.sqrt())
    }

    pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = (0..a.len()).map(|i| (a[i] - ma) * (b[i] - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|x| (x - mb).powi(2)).sum();
        1.0 - cov / (va * vb).sqrt()
    }

    fn normalize(v: &[f64]) -> Vec<f64> {
        let s: f64 = v.iter().sum();
        v.iter().map(|x| x / s).collect()
    }

    pub fn sid(a: &[f64], b: &[f64], eps: f64) -> f64 {
        let p: Vec<f64> = normalize(a).into_iter().map(|x| x.max(eps)).collect();
        let q: Vec<f64> = normalize(b).into_iter().map(|x| x.max(eps)).collect();
        let pq: f64 = (0..p.len()).map(|i| p[i] * (p[i] / q[i]).ln()).sum();
        let qp: f64 = (0..p.len()).map(|i| q[i] * (q[i] / p[i]).ln()).sum();
        pq + qp
    }

    pub fn emd(a: &[f64], b: &[f64]) -> f64 {
        let (p, q) = (normalize(a), normalize(b));
        let mut total = 0.0;
        for i in 0..p.len() {
            let cp: f64 = p[..=i].iter().sum();
            let cq: f64 = q[..=i].iter().sum();
            total += (cp - cq).abs();
        }
        total
    }
}

/// Edge map by direct enumeration of every window entry, with aggregation
/// over a freshly sorted list.
pub fn naive_edge_map(cube: &HsiCube<f64>, config: &LssConfig) -> Vec<f64> {
    let k = (config.window / 2) as i64;
    let (rows, cols) = (cube.rows() as i64, cube.cols() as i64);
    let n = config.window * config.window;
    let mut out = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            let mut entries: Vec<(usize, f64)> = Vec::new();
            for u in -k..=k {
                for v in -k..=k {
                    let idx = ((u + k) * config.window as i64 + (v + k)) as usize;
                    if u == 0 && v == 0 {
                        continue;
                    }
                    let (mut r, mut c) = (i + u, j + v);
                    let inside = r >= 0 && r < rows && c >= 0 && c < cols;
                    if !inside {
                        match config.padding {
                            Padding::ZeroSkip => continue,
                            Padding::Replicate => {
                                r = r.clamp(0, rows - 1);
                                c = c.clamp(0, cols - 1);
                            }
                        }
                    }
                    let d = distance(
                        cube.spectrum(r as usize, c as usize),
                        cube.spectrum(i as usize, j as usize),
                        &config.metric,
                    )
                    .unwrap();
                    entries.push((idx, d));
                }
            }
            let mut vals: Vec<f64> = entries.iter().map(|e| e.1).collect();
            let median = |xs: &mut Vec<f64>| {
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let m = xs.len();
                if m % 2 == 1 {
                    xs[m / 2]
                } else {
                    (xs[m / 2 - 1] + xs[m / 2]) / 2.0
                }
            };
            use lss_core::Aggregator::*;
            let y = match config.aggregator {
                Mean => {
                    let mut s = 0.0;
                    for v in &vals {
                        s += v;
                    }
                    s / vals.len() as f64
                }
                Median => median(&mut vals),
                Min => vals.iter().copied().fold(f64::INFINITY, f64::min),
                Max => vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                Midpoint => {
                    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (lo + hi) / 2.0
                }
                Mad => {
                    let m = median(&mut vals.clone());
                    let mut dev: Vec<f64> = vals.iter().map(|v| (v - m).abs()).collect();
                    median(&mut dev)
                }
                Conv => {
                    let mut s = 0.0;
                    for &(idx, d) in &entries {
                        // h[-u, -v] lives at the mirrored row-major position
                        let w = match &config.kernel {
                            Some(h) => h[n - 1 - idx],
                            None => 1.0 / (n - 1) as f64,
                        };
                        s += d * w;
                    }
                    s
                }
            };
            out.push(y);
        }
    }
    out
}

fn rat(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

/// Otsu split level by exhaustive rational evaluation of the between-class
/// variance `w0 w1 (mu0 - mu1)^2`; lowest level wins ties.
pub fn otsu_oracle(values: &[f64]) -> Option<(usize, Vec<bool>)> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return None;
    }
    let levels: Vec<usize> = values
        .iter()
        .map(|&v| (((v - lo) / (hi - lo) * 256.0).floor() as usize).min(255))
        .collect();
    let mut hist = vec![0i64; 256];
    for &l in &levels {
        hist[l] += 1;
    }
    let n = BigRational::from_integer(BigInt::from(values.len()));
    let mut best: Option<(BigRational, usize)> = None;
    for t in 0..256 {
        let n0: i64 = hist[..=t].iter().sum();
        let n1: i64 = hist[t + 1..].iter().sum();
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let s0: i64 = (0..=t).map(|l| l as i64 * hist[l]).sum();
        let s1: i64 = (t + 1..256).map(|l| l as i64 * hist[l]).sum();
        let big = |x: i64| BigRational::from_integer(BigInt::from(x));
        let w0 = big(n0) / &n;
        let w1 = big(n1) / &n;
        let mu0 = big(s0) / big(n0);
        let mu1 = big(s1) / big(n1);
        let diff = mu0 - mu1;
        let var = w0 * w1 * &diff * &diff;
        if best.as_ref().is_none_or(|(b, _)| var > *b) {
            best = Some((var, t));
        }
    }
    let t = best?.1;
    Some((t, levels.iter().map(|&l| l > t).collect()))
}

/// Minimum-cost transport between two histograms of equal mass with ground
/// distance `|i - j|`, solved as a linear program by exact two-phase
/// simplex (Bland's rule).
pub fn transport_lp(p: &[BigRational], q: &[BigRational]) -> BigRational {
    let n = p.len();
    let vars = n * n;
    // rows: supplies then demands; the last demand row is implied and dropped
    let mut a: Vec<Vec<BigRational>> = Vec::new();
    let mut b: Vec<BigRational> = Vec::new();
    for i in 0..n {
        let mut row = vec![BigRational::zero(); vars];
        for j in 0..n {
            row[i * n + j] = BigRational::one();
        }
        a.push(row);
        b.push(p[i].clone());
    }
    for j in 0..n.saturating_sub(1) {
        let mut row = vec![BigRational::zero(); vars];
        for i in 0..n {
            row[i * n + j] = BigRational::one();
        }
        a.push(row);
        b.push(q[j].clone());
    }
    let cost: Vec<BigRational> = (0..vars)
        .map(|v| BigRational::from_integer(BigInt::from((v / n).abs_diff(v % n))))
        .collect();
    simplex_min(a, b, cost)
}

/// `min c.x  s.t.  A x = b, x >= 0` with `b >= 0` and a bounded optimum.
pub fn simplex_min(a: Vec<Vec<BigRational>>, b: Vec<BigRational>, cost: Vec<BigRational>) -> BigRational {
    let m = a.len();
    let nv = cost.len();
    let width = nv + m;
    let mut tab: Vec<Vec<BigRational>> = a
        .into_iter()
        .zip(&b)
        .enumerate()
        .map(|(i, (mut row, rhs))| {
            row.extend((0..m).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
            row.push(rhs.clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (nv..width).collect();

    let phase1: Vec<BigRational> = (0..width)
        .map(|j| if j >= nv { BigRational::one() } else { BigRational::zero() })
        .collect();
    run_simplex(&mut tab, &mut basis, &phase1, width);

    // drive leftover artificials out of the basis, dropping redundant rows
    let mut r = 0;
    while r < tab.len() {
        if basis[r] >= nv {
            if let Some(j) = (0..nv).find(|&j| !tab[r][j].is_zero()) {
                pivot(&mut tab, &mut basis, r, j);
            } else {
                tab.remove(r);
                basis.remove(r);
                continue;
            }
        }
        r += 1;
    }
    let mut phase2 = cost.clone();
    phase2.extend((0..m).map(|_| BigRational::zero()));
    // artificial columns may no longer enter
    run_simplex_limited(&mut tab, &mut basis, &phase2, nv);
    basis
        .iter()
        .zip(&tab)
        .map(|(&bi, row)| phase2[bi].clone() * row[width].clone())
        .fold(BigRational::zero(), |s, v| s + v)
}

fn pivot(tab: &mut [Vec<BigRational>], basis: &mut [usize], r: usize, j: usize) {
    let p = tab[r][j].clone();
    for v in tab[r].iter_mut() {
        *v = &*v / &p;
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i != r && !row[j].is_zero() {
            let f = row[j].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = &*x - &f * y;
            }
        }
    }
    basis[r] = j;
}

fn run_simplex(tab: &mut [Vec<BigRational>], basis: &mut [usize], cost: &[BigRational], width: usize) {
    run_simplex_limited(tab, basis, cost, width)
}

fn run_simplex_limited(tab: &mut [Vec<BigRational>], basis: &mut [usize], cost: &[BigRational], enter_limit: usize) {
    let rhs = tab[0].len() - 1;
    loop {
        let entering = (0..enter_limit).find(|&j| {
            let z = basis
                .iter()
                .zip(tab.iter())
                .map(|(&bi, row)| cost[bi].clone() * row[j].clone())
                .fold(BigRational::zero(), |s, v| s + v);
            (cost[j].clone() - z).is_negative()
        });
        let Some(j) = entering else { return };
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[j].is_positive() {
                let ratio = row[rhs].clone() / row[j].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("transport problems are bounded");
        pivot(tab, basis, r, j);
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

pub fn rational(v: f64) -> BigRational {
    rat(v)
}
