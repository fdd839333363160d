use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::model::Vec3;

use super::geometry::Aabb;
use super::SceneError;

pub const DEFAULT_CARRIER_FREQUENCY_HZ: f64 = 28e9;
pub const DEFAULT_POWER_FLOOR_DBM: f64 = -200.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    /// Loss per specular bounce, dB.
    pub reflection_loss_db: f64,
}

impl Material {
    pub fn new(name: impl Into<String>, reflection_loss_db: f64) -> Self {
        Self {
            name: name.into(),
            reflection_loss_db,
        }
    }
}

/// Configuration defaults, not measured material properties.
pub fn default_materials() -> Vec<Material> {
    vec![
        Material::new("concrete", 10.0),
        Material::new("glass", 4.0),
        Material::new("metal", 1.0),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub min: Vec3,
    pub max: Vec3,
    pub material: String,
}

impl BoxSpec {
    pub fn new(min: Vec3, max: Vec3, material: impl Into<String>) -> Self {
        Self {
            min,
            max,
            material: material.into(),
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb {
            min: self.min,
            max: self.max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TxSpec {
    pub position: Vec3,
    pub power_dbm: f64,
}

fn default_ground() -> String {
    "concrete".into()
}
fn default_frequency() -> f64 {
    DEFAULT_CARRIER_FREQUENCY_HZ
}
fn default_order() -> u8 {
    2
}
fn default_true() -> bool {
    true
}
fn default_floor() -> f64 {
    DEFAULT_POWER_FLOOR_DBM
}

/// Ground plane at z = 0 plus axis-aligned boxes, one transmitter and the
/// tracer settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(default = "default_ground")]
    pub ground: String,
    #[serde(default)]
    pub boxes: Vec<BoxSpec>,
    pub tx: TxSpec,
    #[serde(default = "default_frequency")]
    pub carrier_frequency_hz: f64,
    #[serde(default = "default_order")]
    pub max_reflection_order: u8,
    #[serde(default = "default_true")]
    pub los_enabled: bool,
    #[serde(default = "default_materials")]
    pub materials: Vec<Material>,
    #[serde(default = "default_floor")]
    pub power_floor_dbm: f64,
}

impl SceneSpec {
    /// Ground-only scene with default materials and settings.
    pub fn open_ground(tx_position: Vec3, tx_power_dbm: f64) -> Self {
        Self {
            ground: default_ground(),
            boxes: Vec::new(),
            tx: TxSpec {
                position: tx_position,
                power_dbm: tx_power_dbm,
            },
            carrier_frequency_hz: DEFAULT_CARRIER_FREQUENCY_HZ,
            max_reflection_order: 2,
            los_enabled: true,
            materials: default_materials(),
            power_floor_dbm: DEFAULT_POWER_FLOOR_DBM,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let scene: SceneSpec = serde_json::from_str(text).map_err(|e| SceneError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn material_loss(&self, name: &str) -> Option<f64> {
        self.materials
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.reflection_loss_db)
    }

    /// Returns a copy with `name`'s loss replaced.
    pub fn with_material_loss(&self, name: &str, loss_db: f64) -> Self {
        let mut s = self.clone();
        for m in &mut s.materials {
            if m.name == name {
                m.reflection_loss_db = loss_db;
            }
        }
        s
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let mut names = HashSet::new();
        for m in &self.materials {
            if !names.insert(m.name.as_str()) {
                return Err(SceneError::Invalid(format!("material {} defined twice", m.name)));
            }
            if !m.reflection_loss_db.is_finite() || m.reflection_loss_db < 0.0 {
                return Err(SceneError::Invalid(format!(
                    "material {} loss must be finite and >= 0",
                    m.name
                )));
            }
        }
        let known = |name: &str| -> Result<(), SceneError> {
            if names.contains(name) {
                Ok(())
            } else {
                Err(SceneError::UnknownMaterial(name.to_string()))
            }
        };
        known(&self.ground)?;
        for (i, b) in self.boxes.iter().enumerate() {
            known(&b.material)?;
            if !(b.min.is_finite() && b.max.is_finite()) {
                return Err(SceneError::Invalid(format!("box {i} has non-finite corners")));
            }
            if !(b.max.x > b.min.x && b.max.y > b.min.y && b.max.z > b.min.z) {
                return Err(SceneError::Invalid(format!("box {i} has non-positive extent")));
            }
            if b.min.z < 0.0 {
                return Err(SceneError::Invalid(format!("box {i} extends below the ground")));
            }
            if b.aabb().contains(self.tx.position) {
                return Err(SceneError::Invalid(format!("transmitter is inside box {i}")));
            }
        }
        if !(self.carrier_frequency_hz > 0.0 && self.carrier_frequency_hz.is_finite()) {
            return Err(SceneError::Invalid("carrier frequency must be positive".into()));
        }
        if self.max_reflection_order > 2 {
            return Err(SceneError::Invalid(format!(
                "max_reflection_order {} not supported (0, 1 or 2)",
                self.max_reflection_order
            )));
        }
        if !(self.tx.position.is_finite() && self.tx.position.z > 0.0) {
            return Err(SceneError::Invalid("transmitter must be above the ground".into()));
        }
        if !self.tx.power_dbm.is_finite() || self.power_floor_dbm.is_nan() {
            return Err(SceneError::Invalid("non-finite transmit power or power floor".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_scene_with_defaults() {
        let s = SceneSpec::from_json(r#"{"tx": {"position": [0, 0, 21.7], "power_dbm": 30}}"#).unwrap();
        assert_eq!(s.carrier_frequency_hz, 28e9);
        assert_eq!(s.material_loss("glass"), Some(4.0));
        assert_eq!(s.max_reflection_order, 2);
        assert!(s.los_enabled);
    }

    #[test]
    fn parse_error_reports_line() {
        let err = SceneSpec::from_json("{\n  \"tx\": {\n    \"position\": [0, 0,\n  }\n}").unwrap_err();
        match err {
            SceneError::Parse { line, .. } => assert!(line >= 3),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_unknown_material_and_flat_box() {
        let mut s = SceneSpec::open_ground(Vec3::new(0.0, 0.0, 10.0), 30.0);
        s.boxes.push(BoxSpec::new(Vec3::new(5.0, 5.0, 0.0), Vec3::new(6.0, 6.0, 3.0), "wood"));
        assert_eq!(s.validate(), Err(SceneError::UnknownMaterial("wood".into())));
        s.boxes[0] = BoxSpec::new(Vec3::new(5.0, 5.0, 0.0), Vec3::new(6.0, 5.0, 3.0), "glass");
        assert!(matches!(s.validate(), Err(SceneError::Invalid(_))));
    }

    #[test]
    fn json_round_trip() {
        let mut s = SceneSpec::open_ground(Vec3::new(0.0, 0.0, 10.0), 30.0);
        s.boxes.push(BoxSpec::new(Vec3::new(5.0, 5.0, 0.0), Vec3::new(6.0, 7.0, 3.0), "metal"));
        assert_eq!(SceneSpec::from_json(&s.to_json()).unwrap(), s);
    }
}
