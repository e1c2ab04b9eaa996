//! INI configuration for the actuator geometry and material.
//!
//! ```ini
//! [geometry]
//! length_mm = 170
//! outer_radius_mm = 12
//! fiber_angle_deg = 5
//!
//! [material]
//! youngs_modulus_kpa = 125
//! ```
//!
//! Every key is optional. Missing `winding_count`, `chamber_height_mm` and
//! `part1_width_mm` are derived from the (possibly overridden) length,
//! pitch, radius and wall thickness.

use std::path::{Path, PathBuf};

use ini::Ini;
use thiserror::Error;

use crate::actuator::{default_winding_count, ActuatorGeometry, MaterialModel, ModelError};

pub const GEOMETRY_KEYS: [&str; 8] = [
    "length_mm",
    "outer_radius_mm",
    "wall_thickness_mm",
    "pitch_mm",
    "fiber_angle_deg",
    "winding_count",
    "chamber_height_mm",
    "part1_width_mm",
];

pub const MATERIAL_KEYS: [&str; 3] = ["youngs_modulus_kpa", "poisson_ratio", "correction_factor"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Syntax(String),
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key {key:?} in [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("key {key:?} in [{section}]: cannot parse {value:?} as a number")]
    BadValue { section: String, key: String, value: String },
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorConfig {
    pub geometry: ActuatorGeometry,
    pub material: MaterialModel,
}

impl ActuatorConfig {
    pub fn from_ini_str(text: &str) -> Result<Self, ConfigError> {
        let ini = Ini::load_from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
        let mut geom_vals: [Option<f64>; 8] = [None; 8];
        let mut mat_vals: [Option<f64>; 3] = [None; 3];

        for (section, props) in ini.iter() {
            let Some(name) = section else {
                if let Some((key, _)) = props.iter().next() {
                    return Err(ConfigError::UnknownKey { section: String::new(), key: key.to_string() });
                }
                continue;
            };
            let (keys, slots): (&[&str], &mut [Option<f64>]) = match name {
                "geometry" => (&GEOMETRY_KEYS, &mut geom_vals),
                "material" => (&MATERIAL_KEYS, &mut mat_vals),
                other => return Err(ConfigError::UnknownSection(other.to_string())),
            };
            for (key, value) in props.iter() {
                let idx = keys.iter().position(|k| *k == key).ok_or_else(|| ConfigError::UnknownKey {
                    section: name.to_string(),
                    key: key.to_string(),
                })?;
                let parsed = value.trim().parse::<f64>().ok().filter(|v| v.is_finite());
                slots[idx] = Some(parsed.ok_or_else(|| ConfigError::BadValue {
                    section: name.to_string(),
                    key: key.to_string(),
                    value: value.to_string(),
                })?);
            }
        }

        let g = |i: usize, default: f64| geom_vals[i].unwrap_or(default);
        let length = g(0, ActuatorGeometry::REFERENCE_LENGTH_MM);
        let r = g(1, ActuatorGeometry::REFERENCE_RADIUS_MM);
        let t = g(2, ActuatorGeometry::REFERENCE_WALL_MM);
        let pitch = g(3, ActuatorGeometry::REFERENCE_PITCH_MM);
        let angle = g(4, ActuatorGeometry::REFERENCE_FIBER_ANGLE_DEG).to_radians();
        let winding_count = match geom_vals[5] {
            Some(v) if v.fract() == 0.0 && v >= 1.0 && v <= f64::from(u32::MAX) => v as u32,
            Some(v) => {
                return Err(ConfigError::BadValue {
                    section: "geometry".into(),
                    key: "winding_count".into(),
                    value: v.to_string(),
                })
            }
            None => default_winding_count(length, pitch),
        };
        let geometry = ActuatorGeometry {
            length_mm: length,
            outer_radius_mm: r,
            wall_thickness_mm: t,
            pitch_mm: pitch,
            fiber_angle_rad: angle,
            winding_count,
            chamber_height_mm: g(6, r - t),
            part1_width_mm: g(7, 2.0 * r),
        };
        let reference = MaterialModel::REFERENCE;
        let material = MaterialModel {
            youngs_modulus_kpa: mat_vals[0].unwrap_or(reference.youngs_modulus_kpa),
            poisson_ratio: mat_vals[1].unwrap_or(reference.poisson_ratio),
            correction_factor: mat_vals[2].unwrap_or(reference.correction_factor),
        };
        geometry.validate()?;
        material.validate()?;
        Ok(Self { geometry, material })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_ini_str(&text)
    }
}
