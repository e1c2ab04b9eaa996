//! Temperature-driven stiffness of the variable-stiffness elements and the
//! motion mode they select.

use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// At or below this temperature the element is stiff, °C.
pub const STIFF_MAX_C: f64 = 10.0;
/// At or above this temperature the element is stretchable, °C.
pub const SOFT_MIN_C: f64 = 28.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StiffnessState {
    Stiff,
    Transition,
    Soft,
}

/// Non-finite temperatures read as `Transition`.
pub fn stiffness_state(temperature_c: f64) -> StiffnessState {
    if temperature_c <= STIFF_MAX_C {
        StiffnessState::Stiff
    } else if temperature_c >= SOFT_MIN_C {
        StiffnessState::Soft
    } else {
        StiffnessState::Transition
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MotionMode {
    Bending,
    Twisting,
    Extension,
}

impl MotionMode {
    pub const ALL: [MotionMode; 3] = [MotionMode::Bending, MotionMode::Twisting, MotionMode::Extension];

    pub fn as_str(&self) -> &'static str {
        match self {
            MotionMode::Bending => "bending",
            MotionMode::Twisting => "twisting",
            MotionMode::Extension => "extension",
        }
    }
}

impl fmt::Display for MotionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MotionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bending" => Ok(MotionMode::Bending),
            "twisting" => Ok(MotionMode::Twisting),
            "extension" => Ok(MotionMode::Extension),
            other => Err(format!("unknown motion mode {other:?}")),
        }
    }
}

/// Motion produced under pressure given the temperatures of the wound
/// thread (Humofit1) and the passive strip (Humofit2).
///
/// Only the three configurations the actuator is operated in are defined;
/// anything involving the transition band or two soft elements is refused.
pub fn motion_mode(humofit1_c: f64, humofit2_c: f64) -> Result<MotionMode, ModelError> {
    use StiffnessState::*;
    let thread = stiffness_state(humofit1_c);
    let strip = stiffness_state(humofit2_c);
    match (thread, strip) {
        (Stiff, Stiff) => Ok(MotionMode::Bending),
        (Soft, Stiff) => Ok(MotionMode::Twisting),
        (Stiff, Soft) => Ok(MotionMode::Extension),
        _ => Err(ModelError::UndefinedConfiguration {
            humofit1: thread,
            humofit2: strip,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(stiffness_state(5.0), StiffnessState::Stiff);
        assert_eq!(stiffness_state(10.0), StiffnessState::Stiff);
        assert_eq!(stiffness_state(19.0), StiffnessState::Transition);
        assert_eq!(stiffness_state(28.0), StiffnessState::Soft);
        assert_eq!(stiffness_state(45.0), StiffnessState::Soft);
        assert_eq!(stiffness_state(f64::NAN), StiffnessState::Transition);
    }

    #[test]
    fn mode_table() {
        assert_eq!(motion_mode(5.0, 5.0).unwrap(), MotionMode::Bending);
        assert_eq!(motion_mode(45.0, 5.0).unwrap(), MotionMode::Twisting);
        assert_eq!(motion_mode(5.0, 45.0).unwrap(), MotionMode::Extension);
        assert!(motion_mode(45.0, 45.0).is_err());
        assert!(motion_mode(19.0, 5.0).is_err());
        assert!(motion_mode(5.0, 19.0).is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for m in MotionMode::ALL {
            assert_eq!(m.as_str().parse::<MotionMode>().unwrap(), m);
        }
        assert!("Bending".parse::<MotionMode>().is_err());
    }
}
