mod common;

use lss_core::baselines::{baseline_edge_map, BaselineKind};
use lss_core::eval::evaluate_masks;
use lss_core::lss::edge_map_with_threads;
use lss_core::{
    distance, edge_map, otsu_threshold, Aggregator, EdgeMap, HsiCube, LssConfig, Mask, MetricKind, MetricSpec,
    Padding, DEFAULT_ALPHA,
};
use proptest::prelude::*;

use common::*;

fn spectrum_pair(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(0.001f64..2.0, n),
            prop::collection::vec(0.001f64..2.0, n),
        )
    })
}

fn small_cube() -> impl Strategy<Value = HsiCube<f64>> {
    (3usize..=9, 3usize..=9, 2usize..=6).prop_flat_map(|(r, c, b)| {
        prop::collection::vec(0.01f64..1.0, r * c * b).prop_map(move |data| HsiCube::new(r, c, b, data).unwrap())
    })
}

fn metric() -> impl Strategy<Value = MetricKind> {
    prop::sample::select(MetricKind::ALL.to_vec())
}

fn aggregator() -> impl Strategy<Value = Aggregator> {
    prop::sample::select(Aggregator::ALL.to_vec())
}

fn d(kind: MetricKind, a: &[f64], b: &[f64]) -> f64 {
    distance(a, b, &MetricSpec::new(kind)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metrics_are_nonnegative_symmetric_and_zero_on_identity((a, b) in spectrum_pair(24), kind in metric()) {
        prop_assume!(a.len() >= kind.min_len());
        let ab = d(kind, &a, &b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - d(kind, &b, &a)).abs() <= 1e-12 * ab.max(1.0));
        prop_assert!(d(kind, &a, &a).abs() <= 1e-12);
    }

    #[test]
    fn true_metrics_obey_the_triangle_inequality(
        (a, b) in spectrum_pair(16),
        seed in any::<u64>(),
        kind in prop::sample::select(vec![MetricKind::Euclidean, MetricKind::Manhattan, MetricKind::Chebyshev, MetricKind::Emd]),
    ) {
        use rand::Rng;
        let mut r = rng(seed);
        let c: Vec<f64> = (0..a.len()).map(|_| r.random_range(0.001..2.0)).collect();
        prop_assert!(d(kind, &a, &c) <= d(kind, &a, &b) + d(kind, &b, &c) + 1e-12);
    }

    #[test]
    fn cosine_ignores_scale((a, b) in spectrum_pair(24), s in 0.1f64..50.0) {
        prop_assume!(a.len() >= 2);
        let scaled: Vec<f64> = a.iter().map(|x| x * s).collect();
        prop_assert!((d(MetricKind::Cosine, &a, &b) - d(MetricKind::Cosine, &scaled, &b)).abs() < 1e-12);
    }

    #[test]
    fn single_band_norms_coincide(x in -5.0f64..5.0, y in -5.0f64..5.0, k in 0.05f64..0.95) {
        let want = (x - y).abs();
        for spec in [
            MetricSpec::new(MetricKind::Euclidean),
            MetricSpec::new(MetricKind::Manhattan),
            MetricSpec::new(MetricKind::Chebyshev),
            MetricSpec::fractional(k).unwrap(),
        ] {
            prop_assert!((distance(&[x], &[y], &spec).unwrap() - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn edge_map_vanishes_on_homogeneous_cubes(
        spectrum in prop::collection::vec(0.01f64..1.0, 2..8),
        rows in 3usize..8,
        cols in 3usize..8,
        kind in metric(),
        agg in aggregator(),
        window in prop::sample::select(vec![3usize, 5]),
    ) {
        let b = spectrum.len();
        let cube = HsiCube::from_fn(rows, cols, b, |_, _, k| spectrum[k]).unwrap();
        let map = edge_map(&cube, &LssConfig::new(window, kind, agg), None).unwrap();
        prop_assert!(map.values().iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn band_order_does_not_matter_except_for_emd(
        cube in small_cube(),
        kind in metric(),
        agg in aggregator(),
        seed in any::<u64>(),
    ) {
        prop_assume!(kind.band_permutation_invariant());
        use rand::seq::SliceRandom;
        let mut order: Vec<usize> = (0..cube.bands()).collect();
        order.shuffle(&mut rng(seed));
        let permuted = HsiCube::from_fn(cube.rows(), cube.cols(), cube.bands(), |r, c, b| cube.get(r, c, order[b])).unwrap();
        let config = LssConfig::new(3, kind, agg);
        let a = edge_map(&cube, &config, None).unwrap();
        let p = edge_map(&permuted, &config, None).unwrap();
        for (x, y) in a.values().iter().zip(p.values()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1e-3), "{x} vs {y}");
        }
    }

    #[test]
    fn thread_count_never_changes_a_bit(cube in small_cube(), kind in metric(), agg in aggregator()) {
        let config = LssConfig::new(3, kind, agg);
        let one = edge_map_with_threads(&cube, &config, None, 1).unwrap();
        for t in [2, 8] {
            let many = edge_map_with_threads(&cube, &config, None, t).unwrap();
            prop_assert!(one.values().iter().zip(many.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn edge_map_equals_naive_reference(
        cube in small_cube(),
        kind in metric(),
        agg in aggregator(),
        skip in any::<bool>(),
        window in prop::sample::select(vec![3usize, 5]),
    ) {
        let pad = if skip { Padding::ZeroSkip } else { Padding::Replicate };
        let config = LssConfig::new(window, kind, agg).with_padding(pad);
        let got = edge_map(&cube, &config, None).unwrap();
        let want = naive_edge_map(&cube, &config);
        prop_assert_eq!(got.values(), want.as_slice());
    }

    #[test]
    fn euclidean_median_scales_with_contrast(c in 1.0f64..20.0, mix in 0usize..3) {
        let base = lss_core::repro::dark_endmember(12);
        let delta: Vec<f64> = (0..12).map(|b| 0.01 + 0.02 * b as f64).collect();
        let scene = |scale: f64| {
            let other: Vec<f64> = base.iter().zip(&delta).map(|(a, d)| a + scale * d).collect();
            lss_core::SceneSpec::two_region(12, 12, base.clone(), other, (1.0, 1.0, 12.0), mix)
        };
        let config = LssConfig::new(3, MetricKind::Euclidean, Aggregator::Median);
        let (one, _) = lss_core::synth_scene::<f64>(&scene(1.0)).unwrap();
        let (big, _) = lss_core::synth_scene::<f64>(&scene(c)).unwrap();
        let m1 = edge_map(&one, &config, None).unwrap();
        let mc = edge_map(&big, &config, None).unwrap();
        for (a, b) in m1.values().iter().zip(mc.values()) {
            prop_assert!(*b >= *a - 1e-12);
            prop_assert!((b - c * a).abs() <= 1e-9 * (c * a).max(1e-9));
        }
    }

    #[test]
    fn otsu_matches_exhaustive_scan(values in prop::collection::vec(0.0f64..100.0, 2..300), coarse in any::<bool>()) {
        let values: Vec<f64> = if coarse { values.iter().map(|v| (v / 10.0).floor()).collect() } else { values };
        let map = EdgeMap::new(1, values.len(), values.clone()).unwrap();
        let got = otsu_threshold(&map);
        match otsu_oracle(&values) {
            None => prop_assert!(got.degenerate && got.mask.count() == 0),
            Some((_, mask)) => prop_assert_eq!(got.mask.bits(), mask.as_slice()),
        }
    }

    #[test]
    fn fom_is_one_only_for_identical_sets(
        bits in prop::collection::vec(any::<bool>(), 64),
        flip in 0usize..64,
    ) {
        prop_assume!(bits.iter().any(|&b| b));
        let ideal = Mask::new(8, 8, bits.clone()).unwrap();
        let same = evaluate_masks(&ideal, &ideal, DEFAULT_ALPHA).unwrap();
        prop_assert_eq!((same.fac, same.mc, same.fom), (0, 0, 1.0));
        let mut other = bits.clone();
        other[flip] = !other[flip];
        let changed = evaluate_masks(&Mask::new(8, 8, other).unwrap(), &ideal, DEFAULT_ALPHA).unwrap();
        // from a perfect match, adding a spurious pixel or dropping a matched one both lower FOM
        prop_assert!(changed.fom < 1.0 && changed.fom > 0.0 || changed.n_actual == 0);
        prop_assert!(changed.fac <= changed.n_actual && changed.mc <= changed.n_ideal);
    }

    #[test]
    fn sobel_magnitude_is_the_norm_of_its_parts(cube in small_cube()) {
        let sx = baseline_edge_map(&cube, BaselineKind::SobelX).unwrap();
        let sy = baseline_edge_map(&cube, BaselineKind::SobelY).unwrap();
        let sxy = baseline_edge_map(&cube, BaselineKind::SobelXy).unwrap();
        let gx = baseline_edge_map(&cube, BaselineKind::GradX).unwrap();
        let gy = baseline_edge_map(&cube, BaselineKind::GradY).unwrap();
        let gm = baseline_edge_map(&cube, BaselineKind::GradXyMean).unwrap();
        for i in 0..sx.values().len() {
            let (x, y) = (sx.values()[i], sy.values()[i]);
            prop_assert_eq!(sxy.values()[i], (x * x + y * y).sqrt());
            prop_assert_eq!(gm.values()[i], (gx.values()[i] + gy.values()[i]) / 2.0);
            prop_assert!(sxy.values()[i] >= 0.0);
        }
    }
}
