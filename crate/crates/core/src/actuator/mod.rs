//! Pressure to twist-radius model of the semicircular fiber-reinforced
//! actuator, obtained from the stationary points of its total potential,
//! plus the temperature logic that selects the motion mode.

mod energy;
mod geometry;
mod modes;
mod solver;
mod state;
mod twist;

pub use energy::{
    elastic_energy_part1, elastic_energy_part2, potential_gradient, potential_hessian, pressure_load,
    pressure_work, strain_components, strain_energy_density, strain_hessian, strain_invariants,
    total_potential, Potential, SectionMoments,
};
pub use geometry::{ActuatorGeometry, MaterialModel};
pub(crate) use geometry::default_winding_count;
pub use modes::{motion_mode, stiffness_state, MotionMode, StiffnessState, SOFT_MIN_C, STIFF_MAX_C};
pub use solver::{
    is_pre_loop, predict_twist_curve, predict_twist_curve_with, solve_equilibrium,
    solve_equilibrium_full_newton, solve_equilibrium_with, EquilibriumSolution, NestedSolver,
    SolveDiagnostics, StartStrategy, TwistCurve, TwistPoint, TwistSample, PHASE_SCAN_STEPS,
    PRE_LOOP_THRESHOLD_KPA,
};
pub use state::{normalize_phase, EquilibriumState, PHI_INDEX, STATE_DIM, STRAIN_DIM};
pub use twist::{twist_radius, STRAIGHT_DENOMINATOR};

use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid pressure {0} kPa")]
    InvalidPressure(f64),
    #[error("invalid pressure sweep: {0}")]
    InvalidSweep(String),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("equilibrium solve failed at {pressure_kpa} kPa after {iterations} iterations (residual {residual:e})")]
    SolverFailure {
        pressure_kpa: f64,
        residual: f64,
        iterations: usize,
        best: Box<EquilibriumState>,
    },
    #[error("strain-block Hessian is not positive definite")]
    IllPosed,
    #[error("straight configuration: twist radius is infinite")]
    StraightConfiguration,
    #[error("undefined configuration: Humofit1 {humofit1:?}, Humofit2 {humofit2:?}")]
    UndefinedConfiguration {
        humofit1: StiffnessState,
        humofit2: StiffnessState,
    },
}
