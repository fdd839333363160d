use crate::model::{
    ComparisonResult, ComparisonStatus, FeatureDistances, HrtComponentMode, MetricConfig, PathSet,
    SetDistances,
};

use super::nn::{nearest_neighbor_assign, Direction, NnAssignment};
use super::standardize::{compute_standardization, standardize};
use super::MetricError;

/// A set distance value with its per-feature components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtDistance {
    pub value: f64,
    pub components: FeatureDistances,
}

/// Both directed nearest-neighbor assignments for a pair of path sets.
#[derive(Debug, Clone, PartialEq)]
pub struct BidirectionalAssignment {
    pub x_to_y: NnAssignment,
    pub y_to_x: NnAssignment,
}

impl BidirectionalAssignment {
    /// Filters, standardizes and assigns in both directions. Fails with the
    /// status that describes an empty input.
    pub fn compute(x: &PathSet, y: &PathSet, cfg: &MetricConfig) -> Result<Self, MetricError> {
        let (x, y) = match cfg.power_threshold_dbm {
            Some(t) => (x.filtered_by_power(t), y.filtered_by_power(t)),
            None => (x.clone(), y.clone()),
        };
        match (x.is_empty(), y.is_empty()) {
            (true, true) => return Err(MetricError::Degenerate(ComparisonStatus::BothEmpty)),
            (true, false) | (false, true) => {
                return Err(MetricError::Degenerate(ComparisonStatus::CoverageMismatch))
            }
            _ => {}
        }
        let (sx, sy) = compute_standardization(&x, &y, cfg.standardization_scope)?;
        let xs = standardize(&x, &sx);
        let ys = standardize(&y, &sy);
        Ok(Self {
            x_to_y: nearest_neighbor_assign(&xs, &ys, cfg, Direction::XToY)?,
            y_to_x: nearest_neighbor_assign(&ys, &xs, cfg, Direction::YToX)?,
        })
    }

    pub fn hausdorff(&self, mode: HrtComponentMode) -> RtDistance {
        let (mx, cx) = directed_max(&self.x_to_y, mode);
        let (my, cy) = directed_max(&self.y_to_x, mode);
        RtDistance {
            value: 0.5 * mx + 0.5 * my,
            components: combine(cx, cy, |a, b| 0.5 * a + 0.5 * b),
        }
    }

    pub fn chamfer(&self) -> RtDistance {
        let (sx, cx) = directed_sum(&self.x_to_y);
        let (sy, cy) = directed_sum(&self.y_to_x);
        let n2 = 2.0 * self.x_to_y.pairs.len() as f64;
        let m2 = 2.0 * self.y_to_x.pairs.len() as f64;
        RtDistance {
            value: sx / n2 + sy / m2,
            components: combine(cx, cy, |a, b| a / n2 + b / m2),
        }
    }
}

fn combine(a: FeatureDistances, b: FeatureDistances, f: impl Fn(f64, f64) -> f64) -> FeatureDistances {
    let (a, b) = (a.as_array(), b.as_array());
    FeatureDistances::from_array(std::array::from_fn(|k| f(a[k], b[k])))
}

/// Largest assignment distance in one direction, with the components chosen
/// per `mode`. In joint-argmax mode the first pair attaining the maximum wins.
fn directed_max(asg: &NnAssignment, mode: HrtComponentMode) -> (f64, FeatureDistances) {
    let mut best = &asg.pairs[0];
    for p in &asg.pairs[1..] {
        if p.d_r > best.d_r {
            best = p;
        }
    }
    let components = match mode {
        HrtComponentMode::JointArgmax => best.components,
        HrtComponentMode::PerFeatureMax => {
            let mut m = [0.0f64; 4];
            for p in &asg.pairs {
                for (mk, ck) in m.iter_mut().zip(p.components.as_array()) {
                    *mk = mk.max(ck);
                }
            }
            FeatureDistances::from_array(m)
        }
    };
    (best.d_r, components)
}

fn directed_sum(asg: &NnAssignment) -> (f64, FeatureDistances) {
    let mut total = 0.0;
    let mut comps = [0.0; 4];
    for p in &asg.pairs {
        total += p.d_r;
        for (s, c) in comps.iter_mut().zip(p.components.as_array()) {
            *s += c;
        }
    }
    (total, FeatureDistances::from_array(comps))
}

/// Symmetrized Hausdorff distance: half the largest X→Y nearest-neighbor
/// distance plus half the largest Y→X one.
pub fn hausdorff_rt(x: &PathSet, y: &PathSet, cfg: &MetricConfig) -> Result<RtDistance, MetricError> {
    Ok(BidirectionalAssignment::compute(x, y, cfg)?.hausdorff(cfg.hrt_component_mode))
}

/// Symmetrized Chamfer distance: the two directed mean nearest-neighbor
/// distances, each halved.
pub fn chamfer_rt(x: &PathSet, y: &PathSet, cfg: &MetricConfig) -> Result<RtDistance, MetricError> {
    Ok(BidirectionalAssignment::compute(x, y, cfg)?.chamfer())
}

/// Full comparison of the two path sets of one receiver. Empty inputs are
/// encoded in the result status; this never fails for a valid config.
pub fn compare_path_sets(x: &PathSet, y: &PathSet, cfg: &MetricConfig) -> ComparisonResult {
    let rx_id = if x.rx_id.is_empty() { y.rx_id.clone() } else { x.rx_id.clone() };
    let counts = |x: &PathSet, y: &PathSet| match cfg.power_threshold_dbm {
        Some(t) => (
            x.paths.iter().filter(|p| p.power_dbm >= t).count(),
            y.paths.iter().filter(|p| p.power_dbm >= t).count(),
        ),
        None => (x.len(), y.len()),
    };
    let n_paths = counts(x, y);
    match BidirectionalAssignment::compute(x, y, cfg) {
        Ok(asg) => {
            let h = asg.hausdorff(cfg.hrt_component_mode);
            let c = asg.chamfer();
            ComparisonResult {
                rx_id,
                status: ComparisonStatus::Ok,
                n_paths,
                distances: Some(SetDistances {
                    hrt: h.value,
                    crt: c.value,
                    hrt_components: h.components,
                    crt_components: c.components,
                }),
            }
        }
        Err(MetricError::Degenerate(ComparisonStatus::BothEmpty)) => ComparisonResult {
            rx_id,
            status: ComparisonStatus::BothEmpty,
            n_paths,
            distances: Some(SetDistances::ZERO),
        },
        Err(_) => ComparisonResult {
            rx_id,
            status: ComparisonStatus::CoverageMismatch,
            n_paths,
            distances: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{composite_distance, feature_distances, StandardizedTuple};
    use crate::model::{PathTuple, StandardizationScope};

    fn path(p: f64, tau_ns: f64, dod: (f64, f64), doa: (f64, f64)) -> PathTuple {
        PathTuple::new(p, tau_ns * 1e-9, dod, doa)
    }

    fn sample_x() -> PathSet {
        PathSet::new(
            "r",
            vec![
                path(-60.0, 100.0, (10.0, 5.0), (-170.0, 2.0)),
                path(-75.0, 180.0, (40.0, -3.0), (150.0, 10.0)),
            ],
        )
    }

    fn sample_y() -> PathSet {
        PathSet::new(
            "r",
            vec![
                path(-62.0, 101.0, (11.0, 5.0), (-169.0, 2.0)),
                path(-90.0, 260.0, (-60.0, 0.0), (100.0, 30.0)),
                path(-74.0, 185.0, (38.0, -2.0), (152.0, 9.0)),
            ],
        )
    }

    #[test]
    fn identity_is_zero() {
        let x = sample_y();
        let r = compare_path_sets(&x, &x, &MetricConfig::default());
        assert_eq!(r.status, ComparisonStatus::Ok);
        let d = r.distances.unwrap();
        assert_eq!(d, SetDistances::ZERO);
    }

    #[test]
    fn singletons_reduce_to_pair_distance() {
        let x = PathSet::new("r", vec![sample_x().paths[0]]);
        let y = PathSet::new("r", vec![sample_y().paths[1]]);
        let cfg = MetricConfig::default();
        let h = hausdorff_rt(&x, &y, &cfg).unwrap();
        let c = chamfer_rt(&x, &y, &cfg).unwrap();
        let (s, _) = compute_standardization(&x, &y, StandardizationScope::Pooled).unwrap();
        let fd = feature_distances(
            &StandardizedTuple::new(&x.paths[0], &s),
            &StandardizedTuple::new(&y.paths[0], &s),
        );
        assert_eq!(h.components, fd);
        assert!((h.value - composite_distance(&fd, &cfg)).abs() < 1e-12);
        assert!((c.value - h.value).abs() < 1e-12);
    }

    #[test]
    fn empty_conventions() {
        let e = PathSet::empty("r");
        let cfg = MetricConfig::default();
        let r = compare_path_sets(&e, &e, &cfg);
        assert_eq!(r.status, ComparisonStatus::BothEmpty);
        assert_eq!(r.hrt(), Some(0.0));
        let r = compare_path_sets(&sample_x(), &e, &cfg);
        assert_eq!(r.status, ComparisonStatus::CoverageMismatch);
        assert_eq!(r.distances, None);
        assert_eq!(r.n_paths, (2, 0));
        assert!(matches!(
            hausdorff_rt(&sample_x(), &e, &cfg),
            Err(MetricError::Degenerate(ComparisonStatus::CoverageMismatch))
        ));
    }

    #[test]
    fn threshold_filters_before_comparison() {
        let cfg = MetricConfig {
            power_threshold_dbm: Some(-80.0),
            ..Default::default()
        };
        let r = compare_path_sets(&sample_x(), &sample_y(), &cfg);
        assert_eq!(r.n_paths, (2, 2));
        let cfg = MetricConfig {
            power_threshold_dbm: Some(-50.0),
            ..Default::default()
        };
        assert_eq!(compare_path_sets(&sample_x(), &sample_y(), &cfg).status, ComparisonStatus::BothEmpty);
    }

    #[test]
    fn crt_never_exceeds_hrt() {
        let r = compare_path_sets(&sample_x(), &sample_y(), &MetricConfig::default());
        let d = r.distances.unwrap();
        assert!(d.crt <= d.hrt + 1e-12);
        for (c, h) in d.crt_components.as_array().iter().zip(d.hrt_components.as_array()) {
            assert!(*c <= h + 1e-12);
        }
    }

    #[test]
    fn joint_argmax_components_sum_to_hrt() {
        let cfg = MetricConfig {
            hrt_component_mode: HrtComponentMode::JointArgmax,
            ..Default::default()
        };
        let h = hausdorff_rt(&sample_x(), &sample_y(), &cfg).unwrap();
        let sum: f64 = h.components.as_array().iter().sum();
        assert!((sum - h.value).abs() < 1e-12);
        let per_feature = hausdorff_rt(&sample_x(), &sample_y(), &MetricConfig::default()).unwrap();
        assert_eq!(per_feature.value, h.value);
        for (a, b) in per_feature.components.as_array().iter().zip(h.components.as_array()) {
            assert!(*a >= b - 1e-15);
        }
    }
}
