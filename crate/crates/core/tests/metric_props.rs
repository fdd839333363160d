mod common;

use proptest::prelude::*;

use rtcompare::metrics::{
    compare_path_sets, compute_standardization, nearest_neighbor_assign_with, standardize, Direction, NnStrategy,
};
use rtcompare::model::{
    normalize_azimuth, validate_path_set, AssignmentMode, Channel, MetricConfig, PathSet, PathTuple,
    StandardizationScope, Weights,
};

fn path() -> impl Strategy<Value = PathTuple> {
    (
        -60.0..60.0f64,
        0.0..3e-6f64,
        -180.0..180.0f64,
        -90.0..=90.0f64,
        -180.0..180.0f64,
        -90.0..=90.0f64,
    )
        .prop_map(|(p, t, a1, e1, a2, e2)| PathTuple::new(p, t, (a1, e1), (a2, e2)))
}

fn set(max: usize) -> impl Strategy<Value = PathSet> {
    prop::collection::vec(path(), 1..=max).prop_map(|p| PathSet::new("r", p))
}

fn ok(x: &PathSet, y: &PathSet, cfg: &MetricConfig) -> (f64, f64, [f64; 4], [f64; 4]) {
    let r = compare_path_sets(x, y, cfg);
    let d = r.distances.expect("non-empty sets compare ok");
    (d.hrt, d.crt, d.hrt_components.as_array(), d.crt_components.as_array())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_is_exactly_zero(x in set(40)) {
        let r = compare_path_sets(&x, &x, &MetricConfig::default());
        for c in Channel::ALL {
            prop_assert_eq!(c.value(&r), Some(0.0));
        }
    }

    #[test]
    fn symmetric(x in set(30), y in set(30)) {
        let cfg = MetricConfig::default();
        let (h1, c1, hc1, cc1) = ok(&x, &y, &cfg);
        let (h2, c2, hc2, cc2) = ok(&y, &x, &cfg);
        prop_assert!((h1 - h2).abs() <= 1e-12);
        prop_assert!((c1 - c2).abs() <= 1e-12);
        for k in 0..4 {
            prop_assert!((hc1[k] - hc2[k]).abs() <= 1e-12);
            prop_assert!((cc1[k] - cc2[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn chamfer_below_hausdorff(x in set(30), y in set(30)) {
        let (h, c, hc, cc) = ok(&x, &y, &MetricConfig::default());
        prop_assert!(c <= h + 1e-12);
        for k in 0..4 {
            prop_assert!(cc[k] <= hc[k] + 1e-12);
        }
    }

    #[test]
    fn matches_direct_evaluation(x in set(12), y in set(12), w in prop::array::uniform4(0.0..5.0f64)) {
        let mut cfg = MetricConfig::default();
        cfg.weights = Weights::new(w[0], w[1], w[2], w[3]);
        let (h, c, _, _) = ok(&x, &y, &cfg);
        let (rh, rc) = common::reference_hrt_crt(&x, &y, w);
        prop_assert!((h - rh).abs() <= 1e-9, "hrt {} vs {}", h, rh);
        prop_assert!((c - rc).abs() <= 1e-9, "crt {} vs {}", c, rc);
    }

    #[test]
    fn single_feature_modes_use_one_component(x in set(12), y in set(12), k in 0usize..4) {
        let modes = [AssignmentMode::DelayOnly, AssignmentMode::PowerOnly, AssignmentMode::DodOnly, AssignmentMode::DoaOnly];
        let cfg = MetricConfig { assignment_mode: modes[k], ..Default::default() };
        let (h, c, _, _) = ok(&x, &y, &cfg);
        let mut w = [0.0; 4];
        w[k] = 1.0;
        let (rh, rc) = common::reference_hrt_crt(&x, &y, w);
        prop_assert!((h - rh).abs() <= 1e-9);
        prop_assert!((c - rc).abs() <= 1e-9);
    }

    #[test]
    fn weights_scale_linearly(x in set(20), y in set(20), k in prop::sample::select(vec![0.5, 3.0, 10.0])) {
        let base = MetricConfig::default();
        let scaled = MetricConfig { weights: base.weights.scaled(k), ..base.clone() };
        let (h1, c1, _, _) = ok(&x, &y, &base);
        let (h2, c2, _, _) = ok(&x, &y, &scaled);
        prop_assert!((h2 - k * h1).abs() <= 1e-12 * (k * h1).abs().max(1e-300));
        prop_assert!((c2 - k * c1).abs() <= 1e-12 * (k * c1).abs().max(1e-300));
    }

    #[test]
    fn per_set_scope_identity(x in set(20)) {
        let cfg = MetricConfig { standardization_scope: StandardizationScope::PerSet, ..Default::default() };
        let (h, c, _, _) = ok(&x, &x, &cfg);
        prop_assert_eq!((h, c), (0.0, 0.0));
    }

    #[test]
    fn kd_tree_agrees_with_scan(x in set(120), y in set(120)) {
        let cfg = MetricConfig::default();
        let (sx, sy) = compute_standardization(&x, &y, cfg.standardization_scope).unwrap();
        let (xs, ys) = (standardize(&x, &sx), standardize(&y, &sy));
        let a = nearest_neighbor_assign_with(&xs, &ys, &cfg, Direction::XToY, NnStrategy::Exhaustive).unwrap();
        let b = nearest_neighbor_assign_with(&xs, &ys, &cfg, Direction::XToY, NnStrategy::KdTree).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn validation_is_idempotent(x in prop::collection::vec((path(), -720.0..720.0f64), 0..20)) {
        let raw = PathSet::new("r", x.into_iter().map(|(mut p, az)| { p.dod_az = az; p }).collect());
        let once = validate_path_set(raw).unwrap();
        let twice = validate_path_set(once.clone()).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn azimuth_normalization(az in -1e4..1e4f64) {
        let a = normalize_azimuth(az);
        prop_assert!((-180.0..180.0).contains(&a));
        prop_assert_eq!(normalize_azimuth(a), a);
    }
}

#[test]
fn kd_tree_tie_break_on_quantized_sets() {
    let mut r = common::rng(3);
    let cfg = MetricConfig::default();
    for _ in 0..200 {
        let x = common::quantized_set(&mut r, "x", 80);
        let y = common::quantized_set(&mut r, "y", 120);
        let (sx, sy) = compute_standardization(&x, &y, cfg.standardization_scope).unwrap();
        let (xs, ys) = (standardize(&x, &sx), standardize(&y, &sy));
        let a = nearest_neighbor_assign_with(&xs, &ys, &cfg, Direction::XToY, NnStrategy::Exhaustive).unwrap();
        let b = nearest_neighbor_assign_with(&xs, &ys, &cfg, Direction::XToY, NnStrategy::KdTree).unwrap();
        assert_eq!(a, b);
    }
}
