use crate::model::{PathSet, PathTuple, StandardizationScope, StandardizationStats};

use super::distance::direction_unit_vector;
use super::MetricError;

/// Standard deviations below this are replaced by 1 before dividing.
pub const SIGMA_GUARD: f64 = 1e-12;

/// A path with power and delay standardized and both directions expanded to
/// unit vectors. Angles are kept in degrees for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizedTuple {
    pub p_bar: f64,
    pub tau_bar: f64,
    pub dod_az: f64,
    pub dod_el: f64,
    pub doa_az: f64,
    pub doa_el: f64,
    pub dod_unit: [f64; 3],
    pub doa_unit: [f64; 3],
}

impl StandardizedTuple {
    pub fn new(path: &PathTuple, stats: &StandardizationStats) -> Self {
        Self {
            p_bar: (path.power_dbm - stats.mu_p) / guarded(stats.sigma_p),
            tau_bar: (path.delay_s - stats.mu_tau) / guarded(stats.sigma_tau),
            dod_az: path.dod_az,
            dod_el: path.dod_el,
            doa_az: path.doa_az,
            doa_el: path.doa_el,
            dod_unit: direction_unit_vector(path.dod_az, path.dod_el),
            doa_unit: direction_unit_vector(path.doa_az, path.doa_el),
        }
    }
}

#[inline]
fn guarded(sigma: f64) -> f64 {
    if sigma >= SIGMA_GUARD {
        sigma
    } else {
        1.0
    }
}

/// Population mean and standard deviation. A constant column yields its
/// value and exactly zero, so the standardized column is exactly zero.
fn population_stats(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let mut n = 0usize;
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.clone() {
        n += 1;
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    if lo == hi {
        return (lo, 0.0);
    }
    let mean = sum / n as f64;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    (mean, var.sqrt())
}

fn stats_over<'a>(paths: impl Iterator<Item = &'a PathTuple> + Clone) -> StandardizationStats {
    let (mu_p, sigma_p) = population_stats(paths.clone().map(|p| p.power_dbm));
    let (mu_tau, sigma_tau) = population_stats(paths.map(|p| p.delay_s));
    StandardizationStats {
        mu_p,
        sigma_p,
        mu_tau,
        sigma_tau,
    }
}

/// Statistics used to standardize X and Y respectively. Under the pooled
/// scope both entries are the same statistics over X ∪ Y.
pub fn compute_standardization(
    x: &PathSet,
    y: &PathSet,
    scope: StandardizationScope,
) -> Result<(StandardizationStats, StandardizationStats), MetricError> {
    match scope {
        StandardizationScope::Pooled => {
            if x.is_empty() && y.is_empty() {
                return Err(MetricError::EmptyInput("pooled standardization over two empty sets"));
            }
            let s = stats_over(x.paths.iter().chain(y.paths.iter()));
            Ok((s, s))
        }
        StandardizationScope::PerSet => {
            if x.is_empty() || y.is_empty() {
                return Err(MetricError::EmptyInput("per-set standardization of an empty set"));
            }
            Ok((stats_over(x.paths.iter()), stats_over(y.paths.iter())))
        }
    }
}

pub fn standardize(set: &PathSet, stats: &StandardizationStats) -> Vec<StandardizedTuple> {
    set.paths
        .iter()
        .map(|p| StandardizedTuple::new(p, stats))
        .collect()
}
