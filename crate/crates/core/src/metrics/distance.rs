use crate::model::{FeatureDistances, MetricConfig};

use super::StandardizedTuple;

/// Unit vector `[cos el cos az, cos el sin az, sin el]` for angles in degrees.
pub fn direction_unit_vector(az_deg: f64, el_deg: f64) -> [f64; 3] {
    let (sa, ca) = az_deg.to_radians().sin_cos();
    let (se, ce) = el_deg.to_radians().sin_cos();
    [ce * ca, ce * sa, se]
}

/// Cosine distance `1 - a·b` between two unit vectors.
///
/// Evaluated as half the squared chord `|a - b|² / 2`, which equals `1 - a·b`
/// for unit vectors, is exactly zero for identical inputs and is monotone in
/// each coordinate gap (the kd-tree bound relies on that).
#[inline]
pub(crate) fn cosine_from_gaps(dx: f64, dy: f64, dz: f64) -> f64 {
    (0.5 * (dx * dx + dy * dy + dz * dz)).min(2.0)
}

#[inline]
pub(crate) fn cosine_between(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    cosine_from_gaps(a[0] - b[0], a[1] - b[1], a[2] - b[2])
}

/// Cosine distance between two (azimuth, elevation) directions in degrees, in [0, 2].
pub fn angular_distance(az1: f64, el1: f64, az2: f64, el2: f64) -> f64 {
    cosine_between(
        &direction_unit_vector(az1, el1),
        &direction_unit_vector(az2, el2),
    )
}

/// The four per-feature distances between two standardized tuples.
#[inline]
pub fn feature_distances(v: &StandardizedTuple, w: &StandardizedTuple) -> FeatureDistances {
    FeatureDistances {
        d_tau: (v.tau_bar - w.tau_bar).abs(),
        d_p: (v.p_bar - w.p_bar).abs(),
        d_dod: cosine_between(&v.dod_unit, &w.dod_unit),
        d_doa: cosine_between(&v.doa_unit, &w.doa_unit),
    }
}

/// Weighted sum of the components. With unit weights this is the plain
/// four-term sum.
#[inline]
pub fn composite_distance(fd: &FeatureDistances, cfg: &MetricConfig) -> f64 {
    cfg.weights.dot(fd)
}
