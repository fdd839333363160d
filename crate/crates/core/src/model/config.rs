use serde::{Deserialize, Serialize};
use std::str::FromStr;

use super::{FeatureDistances, ValidationError};

/// Non-negative weights of the delay, power, DoD and DoA components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub tau: f64,
    pub p: f64,
    pub dod: f64,
    pub doa: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Self::UNIT
    }
}

impl Weights {
    pub const UNIT: Weights = Weights {
        tau: 1.0,
        p: 1.0,
        dod: 1.0,
        doa: 1.0,
    };

    pub fn new(tau: f64, p: f64, dod: f64, doa: f64) -> Self {
        Self { tau, p, dod, doa }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.tau, self.p, self.dod, self.doa]
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.tau * k, self.p * k, self.dod * k, self.doa * k)
    }

    /// Weighted sum of the four components, always evaluated in the same order.
    #[inline]
    pub fn dot(&self, fd: &FeatureDistances) -> f64 {
        self.tau * fd.d_tau + self.p * fd.d_p + self.dod * fd.d_dod + self.doa * fd.d_doa
    }
}

impl FromStr for Weights {
    type Err = String;

    /// Parses `w_tau,w_p,w_dod,w_doa`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad weight {t:?}: {e}")))
            .collect::<Result<_, _>>()?;
        if parts.len() != 4 {
            return Err(format!("expected 4 comma-separated weights, got {}", parts.len()));
        }
        Ok(Weights::new(parts[0], parts[1], parts[2], parts[3]))
    }
}

/// Which distance drives the nearest-neighbor assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentMode {
    /// Weighted composite of all four components.
    #[default]
    Joint,
    DelayOnly,
    PowerOnly,
    DodOnly,
    DoaOnly,
}

impl AssignmentMode {
    /// Index into `FeatureDistances::as_array` for the single-feature modes.
    pub fn feature_index(&self) -> Option<usize> {
        match self {
            AssignmentMode::Joint => None,
            AssignmentMode::DelayOnly => Some(0),
            AssignmentMode::PowerOnly => Some(1),
            AssignmentMode::DodOnly => Some(2),
            AssignmentMode::DoaOnly => Some(3),
        }
    }
}

impl FromStr for AssignmentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "joint" => Ok(AssignmentMode::Joint),
            "delay-only" | "delay" => Ok(AssignmentMode::DelayOnly),
            "power-only" | "power" => Ok(AssignmentMode::PowerOnly),
            "dod-only" | "dod" => Ok(AssignmentMode::DodOnly),
            "doa-only" | "doa" => Ok(AssignmentMode::DoaOnly),
            _ => Err(format!("unknown assignment mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardizationScope {
    /// Statistics over X ∪ Y, shared by both sets.
    #[default]
    Pooled,
    /// X standardized with its own statistics, Y with its own.
    PerSet,
}

impl FromStr for StandardizationScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(StandardizationScope::Pooled),
            "per-set" => Ok(StandardizationScope::PerSet),
            _ => Err(format!("unknown standardization scope {s:?}")),
        }
    }
}

/// How the per-feature HRT components are extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HrtComponentMode {
    /// Per feature, the maximum over all assigned pairs in each direction.
    #[default]
    PerFeatureMax,
    /// Components of the pair attaining each directed maximum.
    JointArgmax,
}

impl FromStr for HrtComponentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-feature-max" => Ok(HrtComponentMode::PerFeatureMax),
            "joint-argmax" => Ok(HrtComponentMode::JointArgmax),
            _ => Err(format!("unknown HRT component mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    pub weights: Weights,
    pub assignment_mode: AssignmentMode,
    pub standardization_scope: StandardizationScope,
    pub power_threshold_dbm: Option<f64>,
    pub hrt_component_mode: HrtComponentMode,
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        let w = self.weights.as_array();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(ValidationError::Config(format!(
                "weights must be finite and non-negative, got {w:?}"
            )));
        }
        if self.assignment_mode == AssignmentMode::Joint && w.iter().all(|x| *x == 0.0) {
            return Err(ValidationError::Config(
                "joint assignment needs at least one positive weight".into(),
            ));
        }
        if let Some(t) = self.power_threshold_dbm {
            if !t.is_finite() {
                return Err(ValidationError::Config("power threshold must be finite".into()));
            }
        }
        Ok(())
    }

    /// Weights that define the assignment distance: the configured weights in
    /// joint mode, a unit one-hot vector in single-feature modes.
    pub fn assignment_weights(&self) -> Weights {
        match self.assignment_mode.feature_index() {
            None => self.weights,
            Some(i) => {
                let mut w = [0.0; 4];
                w[i] = 1.0;
                Weights::new(w[0], w[1], w[2], w[3])
            }
        }
    }
}
