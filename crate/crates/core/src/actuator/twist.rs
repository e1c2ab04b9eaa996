use super::state::EquilibriumState;
use super::ModelError;

/// Denominators smaller than this mean an effectively straight actuator.
pub const STRAIGHT_DENOMINATOR: f64 = 1e-12;

/// Radius of the coil traced by the actuator, from the principal
/// curvatures and the phase of the principal frame.
///
/// The sign of the curvature ratio only encodes the coiling direction; the
/// returned radius is its magnitude.
pub fn twist_radius(state: &EquilibriumState) -> Result<f64, ModelError> {
    let (k1, k2) = (state.k1, state.k2);
    let c = (2.0 * state.phi).cos();
    let num = k1 + k2 + (k1 - k2) * c;
    let den = k1 * k1 + k2 * k2 + (k1 - k2) * (k1 + k2) * c;
    if !(den.abs() >= STRAIGHT_DENOMINATOR) {
        return Err(ModelError::StraightConfiguration);
    }
    let r = (num / den).abs();
    if r.is_finite() {
        Ok(r)
    } else {
        Err(ModelError::StraightConfiguration)
    }
}
