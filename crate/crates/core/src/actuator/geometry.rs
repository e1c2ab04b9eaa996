use std::f64::consts::{FRAC_PI_2, PI};

use super::ModelError;

/// Physical description of the semicircular fiber-reinforced actuator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorGeometry {
    pub length_mm: f64,
    /// Radius `r` of the semicircular cross-section.
    pub outer_radius_mm: f64,
    /// Wall thickness `t`.
    pub wall_thickness_mm: f64,
    /// Axial spacing `p` between fiber windings; one chamber per pitch.
    pub pitch_mm: f64,
    /// Winding inclination `θ`.
    pub fiber_angle_rad: f64,
    /// Number of windings `n`; the actuator has `n + 1` chambers.
    pub winding_count: u32,
    /// Chamber height `h1`.
    pub chamber_height_mm: f64,
    /// Width `W` of the flat part of the cross-section.
    pub part1_width_mm: f64,
}

impl ActuatorGeometry {
    pub const REFERENCE_LENGTH_MM: f64 = 170.0;
    pub const REFERENCE_RADIUS_MM: f64 = 12.0;
    pub const REFERENCE_WALL_MM: f64 = 3.0;
    pub const REFERENCE_PITCH_MM: f64 = 4.0;
    pub const REFERENCE_FIBER_ANGLE_DEG: f64 = 5.0;

    /// Geometry of the reference actuator, with the unlisted dimensions
    /// derived from the semicircular section (see [`Self::derived`]).
    pub fn reference() -> Self {
        Self::derived(
            Self::REFERENCE_LENGTH_MM,
            Self::REFERENCE_RADIUS_MM,
            Self::REFERENCE_WALL_MM,
            Self::REFERENCE_PITCH_MM,
            Self::REFERENCE_FIBER_ANGLE_DEG.to_radians(),
        )
    }

    /// Fills in `W = 2r`, `h1 = r - t` and `n = floor(length / pitch)`.
    pub fn derived(length_mm: f64, r: f64, t: f64, pitch_mm: f64, fiber_angle_rad: f64) -> Self {
        Self {
            length_mm,
            outer_radius_mm: r,
            wall_thickness_mm: t,
            pitch_mm,
            fiber_angle_rad,
            winding_count: default_winding_count(length_mm, pitch_mm),
            chamber_height_mm: r - t,
            part1_width_mm: 2.0 * r,
        }
    }

    pub fn chamber_count(&self) -> f64 {
        f64::from(self.winding_count) + 1.0
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidGeometry(msg));
        let fields = [
            self.length_mm,
            self.outer_radius_mm,
            self.wall_thickness_mm,
            self.pitch_mm,
            self.fiber_angle_rad,
            self.chamber_height_mm,
            self.part1_width_mm,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return bad("all dimensions must be finite".into());
        }
        let (r, t) = (self.outer_radius_mm, self.wall_thickness_mm);
        if !(self.length_mm > 0.0) {
            return bad(format!("length must be positive, got {}", self.length_mm));
        }
        if !(t > 0.0 && t < r) {
            return bad(format!("wall thickness must satisfy 0 < t < r, got t={t}, r={r}"));
        }
        if !(self.pitch_mm > 0.0) {
            return bad(format!("pitch must be positive, got {}", self.pitch_mm));
        }
        if !(self.fiber_angle_rad > 0.0 && self.fiber_angle_rad < FRAC_PI_2) {
            return bad(format!(
                "fiber angle must lie in (0, 90) degrees, got {}",
                self.fiber_angle_rad * 180.0 / PI
            ));
        }
        if self.winding_count < 1 {
            return bad("winding count must be at least 1".into());
        }
        if !(self.chamber_height_mm > 0.0 && self.chamber_height_mm <= r - t) {
            return bad(format!(
                "chamber height must satisfy 0 < h1 <= r - t = {}, got {}",
                r - t,
                self.chamber_height_mm
            ));
        }
        if !(self.part1_width_mm > 0.0 && self.part1_width_mm <= 2.0 * r) {
            return bad(format!(
                "part-1 width must satisfy 0 < W <= 2r = {}, got {}",
                2.0 * r,
                self.part1_width_mm
            ));
        }
        Ok(())
    }
}

impl Default for ActuatorGeometry {
    fn default() -> Self {
        Self::reference()
    }
}

pub(crate) fn default_winding_count(length_mm: f64, pitch_mm: f64) -> u32 {
    let n = (length_mm / pitch_mm).floor();
    if n.is_finite() && n >= 1.0 {
        n as u32
    } else {
        1
    }
}

/// Linear-elastic constants of the elastomer plus the calibration factor
/// applied to the pressure work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialModel {
    pub youngs_modulus_kpa: f64,
    pub poisson_ratio: f64,
    pub correction_factor: f64,
}

impl MaterialModel {
    pub const REFERENCE: MaterialModel = MaterialModel {
        youngs_modulus_kpa: 125.0,
        poisson_ratio: 0.5,
        correction_factor: 0.003,
    };

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidMaterial(msg));
        if !(self.youngs_modulus_kpa > 0.0 && self.youngs_modulus_kpa.is_finite()) {
            return bad(format!("Young's modulus must be positive, got {}", self.youngs_modulus_kpa));
        }
        if !(0.0..=0.5).contains(&self.poisson_ratio) {
            return bad(format!("Poisson ratio must lie in [0, 0.5], got {}", self.poisson_ratio));
        }
        if !(self.correction_factor > 0.0 && self.correction_factor.is_finite()) {
            return bad(format!("correction factor must be positive, got {}", self.correction_factor));
        }
        Ok(())
    }

    /// Coefficient of `J2` in the strain energy density.
    pub fn shear_coefficient(&self) -> f64 {
        0.5 * self.youngs_modulus_kpa / (1.0 + self.poisson_ratio)
    }

    /// Coefficient of `J1^2` in the strain energy density.
    pub fn volumetric_coefficient(&self) -> f64 {
        let v = self.poisson_ratio;
        self.youngs_modulus_kpa * v * (1.0 - 2.0 * v) / (1.0 + v)
    }
}

impl Default for MaterialModel {
    fn default() -> Self {
        Self::REFERENCE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_dimensions() {
        let g = ActuatorGeometry::reference();
        assert_eq!(g.winding_count, 42);
        assert_eq!(g.chamber_height_mm, 9.0);
        assert_eq!(g.part1_width_mm, 24.0);
        assert!(g.validate().is_ok());
        assert!(MaterialModel::REFERENCE.validate().is_ok());
    }

    #[test]
    fn invalid_geometry() {
        let mut g = ActuatorGeometry::reference();
        g.wall_thickness_mm = 12.0;
        assert!(g.validate().is_err());
        let mut g = ActuatorGeometry::reference();
        g.fiber_angle_rad = 0.0;
        assert!(g.validate().is_err());
        let mut g = ActuatorGeometry::reference();
        g.chamber_height_mm = 9.5;
        assert!(g.validate().is_err());
        let mut g = ActuatorGeometry::reference();
        g.part1_width_mm = 24.5;
        assert!(g.validate().is_err());
        let mut g = ActuatorGeometry::reference();
        g.winding_count = 0;
        assert!(g.validate().is_err());
    }

    #[test]
    fn invalid_material() {
        let m = MaterialModel { poisson_ratio: 0.6, ..MaterialModel::REFERENCE };
        assert!(m.validate().is_err());
        let m = MaterialModel { youngs_modulus_kpa: 0.0, ..MaterialModel::REFERENCE };
        assert!(m.validate().is_err());
        let m = MaterialModel { correction_factor: -1.0, ..MaterialModel::REFERENCE };
        assert!(m.validate().is_err());
    }
}
