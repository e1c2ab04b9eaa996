//! Equilibrium of the total potential.
//!
//! For a fixed phase the potential is quadratic in the six strain unknowns,
//! so the strain block follows from one symmetric solve. The phase is then
//! located by scanning the reduced derivative over `[0, pi)` in one-degree
//! steps and bisecting every minus-to-plus sign change. The lowest such
//! minimum seeds a damped Newton polish on all seven unknowns.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::energy::Potential;
use super::state::{normalize_phase, EquilibriumState, PHI_INDEX, STATE_DIM, STRAIN_DIM};
use super::twist::twist_radius;
use super::{ActuatorGeometry, MaterialModel, ModelError};
use crate::numerics::{newton_minimize, newton_stationary, solve_symmetric, NumericsError, SolverSettings};

/// Pressure below which the actuator has not yet formed a visible loop and
/// the twist prediction is flagged rather than trusted, kPa.
pub const PRE_LOOP_THRESHOLD_KPA: f64 = 18.0;

/// Number of phase samples in the sign-change scan (one degree apart).
pub const PHASE_SCAN_STEPS: usize = 180;

/// Relative gap below which two phase minima are treated as equal; the
/// smaller phase wins.
const MINIMUM_TIE_TOLERANCE: f64 = 1e-12;

/// Rounds of rescaling allowed while the potential drifts during Newton.
const MAX_SCALE_ROUNDS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    /// Gradient max-norm divided by `max(1, |potential|)`.
    pub residual: f64,
    pub iterations: usize,
    pub potential: f64,
    pub pre_loop: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    pub state: EquilibriumState,
    pub diagnostics: SolveDiagnostics,
}

pub fn is_pre_loop(pressure_kpa: f64) -> bool {
    pressure_kpa < PRE_LOOP_THRESHOLD_KPA
}

fn scaled_residual(pot: &Potential, state: &EquilibriumState) -> (f64, f64) {
    let value = pot.value_from_moments(state);
    let g = pot.gradient(state);
    let gmax = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    (gmax / value.abs().max(1.0), value)
}

/// Strain block and phase from the reduced (strain-eliminated) problem.
#[derive(Debug, Clone)]
pub struct NestedSolver {
    potential: Potential,
    /// Strain response to a unit load on `e11` and on `e22`.
    unit_responses: [DVector<f64>; 2],
}

impl NestedSolver {
    pub fn new(geom: &ActuatorGeometry, mat: &MaterialModel, pressure_kpa: f64) -> Result<Self, ModelError> {
        let potential = Potential::new(geom, mat, pressure_kpa)?;
        let h = potential.strain_hessian();
        let solve = |k: usize| {
            let mut rhs = DVector::zeros(STRAIN_DIM);
            rhs[k] = 1.0;
            solve_symmetric(&h, &rhs).map_err(|e| match e {
                NumericsError::IndefiniteMatrix => ModelError::IllPosed,
                other => other.into(),
            })
        };
        let unit_responses = [solve(0)?, solve(1)?];
        Ok(Self { potential, unit_responses })
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Minimizing strain block for a fixed phase.
    pub fn strain_state(&self, phi: f64) -> EquilibriumState {
        let geom = &self.potential.geometry;
        let (s, c) = (geom.fiber_angle_rad - phi).sin_cos();
        let force = geom.chamber_count() * self.potential.load();
        let x = (&self.unit_responses[0] * (s * s) + &self.unit_responses[1] * (c * c)) * force;
        let mut v = [0.0; STATE_DIM];
        v[..STRAIN_DIM].copy_from_slice(x.as_slice());
        v[PHI_INDEX] = phi;
        EquilibriumState::from_array(v)
    }

    /// Derivative of the reduced potential with respect to the phase.
    pub fn phase_derivative(&self, phi: f64) -> f64 {
        self.potential.gradient(&self.strain_state(phi))[PHI_INDEX]
    }

    pub fn reduced_potential(&self, phi: f64) -> f64 {
        self.potential.value_from_moments(&self.strain_state(phi))
    }

    /// Local minima of the reduced potential in `[0, pi)`.
    pub fn phase_minima(&self) -> Vec<f64> {
        let step = PI / PHASE_SCAN_STEPS as f64;
        let derivs: Vec<f64> = (0..=PHASE_SCAN_STEPS)
            .map(|k| {
                if k == PHASE_SCAN_STEPS {
                    f64::NAN
                } else {
                    self.phase_derivative(k as f64 * step)
                }
            })
            .collect();
        let mut minima = Vec::new();
        for k in 0..PHASE_SCAN_STEPS {
            let lo = derivs[k];
            // the potential has period pi in the phase
            let hi = if k + 1 == PHASE_SCAN_STEPS { derivs[0] } else { derivs[k + 1] };
            if lo < 0.0 && hi >= 0.0 {
                minima.push(normalize_phase(self.bisect(k as f64 * step, (k + 1) as f64 * step)));
            }
        }
        minima
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phase_derivative(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lowest phase minimum and its strain block. A flat phase profile
    /// (no load) yields phase zero.
    pub fn solve(&self) -> EquilibriumState {
        let mut best: Option<(f64, f64)> = None;
        for phi in self.phase_minima() {
            let value = self.reduced_potential(phi);
            best = match best {
                None => Some((phi, value)),
                Some((bp, bv)) => {
                    let tie = (value - bv).abs() <= MINIMUM_TIE_TOLERANCE * bv.abs().max(1.0);
                    if (!tie && value < bv) || (tie && phi < bp) {
                        Some((phi, value))
                    } else {
                        Some((bp, bv))
                    }
                }
            };
        }
        self.strain_state(best.map_or(0.0, |(phi, _)| phi))
    }
}

fn to_dvector(s: &EquilibriumState) -> DVector<f64> {
    DVector::from_column_slice(&s.to_array())
}

fn from_dvector(v: &DVector<f64>) -> EquilibriumState {
    EquilibriumState::from_slice(v.as_slice())
}

fn map_newton_error(err: NumericsError, pressure_kpa: f64) -> ModelError {
    match err {
        NumericsError::NotConverged { best, residual, iterations } => ModelError::SolverFailure {
            pressure_kpa,
            residual,
            iterations,
            best: Box::new(EquilibriumState::from_slice(&best)),
        },
        other => other.into(),
    }
}

fn check_accepted(pot: &Potential) -> Result<(), ModelError> {
    if pot.strain_hessian().cholesky().is_none() {
        return Err(ModelError::IllPosed);
    }
    Ok(())
}

/// Newton polish on all seven unknowns, rescaling the gradient by
/// `max(1, |potential|)` until the scaled residual meets the tolerance.
fn polish(
    pot: &Potential,
    seed: EquilibriumState,
    settings: &SolverSettings,
) -> Result<(EquilibriumState, usize), ModelError> {
    let mut state = seed;
    let mut iterations = 0;
    for _ in 0..MAX_SCALE_ROUNDS {
        let (residual, value) = scaled_residual(pot, &state);
        if residual < settings.gradient_tol {
            return Ok((state, iterations));
        }
        let scale = value.abs().max(1.0);
        let grad = |x: &DVector<f64>| {
            let g = pot.gradient(&from_dvector(x));
            Ok(DVector::from_iterator(STATE_DIM, g.iter().map(|v| v / scale)))
        };
        let remaining = SolverSettings {
            max_iterations: settings.max_iterations.saturating_sub(iterations).max(1),
            ..*settings
        };
        let (x, report) = newton_stationary(grad, &to_dvector(&state), &remaining)
            .map_err(|e| map_newton_error(e, pot.pressure_kpa))?;
        iterations += report.iterations;
        state = from_dvector(&x);
    }
    let (residual, _) = scaled_residual(pot, &state);
    if residual < settings.gradient_tol {
        Ok((state, iterations))
    } else {
        Err(ModelError::SolverFailure {
            pressure_kpa: pot.pressure_kpa,
            residual,
            iterations,
            best: Box::new(state),
        })
    }
}

fn finish(
    pot: &Potential,
    state: EquilibriumState,
    iterations: usize,
) -> Result<EquilibriumSolution, ModelError> {
    check_accepted(pot)?;
    let state = state.normalized();
    let (residual, potential) = scaled_residual(pot, &state);
    Ok(EquilibriumSolution {
        state,
        diagnostics: SolveDiagnostics {
            residual,
            iterations,
            potential,
            pre_loop: is_pre_loop(pot.pressure_kpa),
        },
    })
}

fn zero_solution(pressure_kpa: f64) -> EquilibriumSolution {
    EquilibriumSolution {
        state: EquilibriumState::zero(),
        diagnostics: SolveDiagnostics {
            residual: 0.0,
            iterations: 0,
            potential: 0.0,
            pre_loop: is_pre_loop(pressure_kpa),
        },
    }
}

/// Is the full 7x7 Hessian positive definite, i.e. a true local minimum
/// rather than a saddle in the phase direction?
fn is_local_minimum(pot: &Potential, state: &EquilibriumState) -> bool {
    let h: DMatrix<f64> = pot.hessian(state);
    h.cholesky().is_some()
}

/// Solves the stationarity system at one pressure.
///
/// With `init = None` the nested phase scan provides the seed. With a warm
/// start the Newton polish begins at `init`; if that lands on a saddle in
/// the phase direction the cold path is used instead.
pub fn solve_equilibrium(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    pressure_kpa: f64,
    init: Option<&EquilibriumState>,
) -> Result<EquilibriumSolution, ModelError> {
    solve_equilibrium_with(geom, mat, pressure_kpa, init, &SolverSettings::default())
}

pub fn solve_equilibrium_with(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    pressure_kpa: f64,
    init: Option<&EquilibriumState>,
    settings: &SolverSettings,
) -> Result<EquilibriumSolution, ModelError> {
    settings.validate()?;
    let nested = NestedSolver::new(geom, mat, pressure_kpa)?;
    let pot = nested.potential();
    check_accepted(pot)?;
    if pressure_kpa == 0.0 {
        return Ok(zero_solution(pressure_kpa));
    }
    if let Some(seed) = init.filter(|s| s.is_finite()) {
        if let Ok((state, iterations)) = polish(pot, *seed, settings) {
            if is_local_minimum(pot, &state) {
                return finish(pot, state, iterations);
            }
        }
    }
    let (state, iterations) = polish(pot, nested.solve(), settings)?;
    finish(pot, state, iterations)
}

/// Independent route: descent Newton on all seven unknowns from a cold
/// seed, without the strain elimination or the phase scan.
///
/// The default seed is the unstrained state at phase zero.
pub fn solve_equilibrium_full_newton(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    pressure_kpa: f64,
    seed: Option<&EquilibriumState>,
    settings: &SolverSettings,
) -> Result<EquilibriumSolution, ModelError> {
    settings.validate()?;
    let pot = Potential::new(geom, mat, pressure_kpa)?;
    check_accepted(&pot)?;
    if pressure_kpa == 0.0 {
        return Ok(zero_solution(pressure_kpa));
    }
    let mut state = seed.copied().unwrap_or_default();
    let mut iterations = 0;
    for _ in 0..MAX_SCALE_ROUNDS {
        let (residual, value) = scaled_residual(&pot, &state);
        if residual < settings.gradient_tol {
            break;
        }
        let scale = value.abs().max(1.0);
        let f = |x: &DVector<f64>| Ok(pot.value_from_moments(&from_dvector(x)) / scale);
        let g = |x: &DVector<f64>| {
            Ok(DVector::from_iterator(
                STATE_DIM,
                pot.gradient(&from_dvector(x)).iter().map(|v| v / scale),
            ))
        };
        let h = |x: &DVector<f64>| Ok(pot.hessian(&from_dvector(x)) / scale);
        let (x, report) = newton_minimize(f, g, h, &to_dvector(&state), settings)
            .map_err(|e| map_newton_error(e, pressure_kpa))?;
        iterations += report.iterations;
        state = from_dvector(&x);
    }
    let (residual, _) = scaled_residual(&pot, &state);
    if residual >= settings.gradient_tol {
        return Err(ModelError::SolverFailure {
            pressure_kpa,
            residual,
            iterations,
            best: Box::new(state),
        });
    }
    finish(&pot, state, iterations)
}

/// One point of a predicted pressure sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistSample {
    pub pressure_kpa: f64,
    pub pre_loop: bool,
    pub outcome: Result<TwistPoint, ModelError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwistPoint {
    pub state: EquilibriumState,
    /// Infinite for a straight (uncurved) configuration.
    pub twist_radius_mm: f64,
    pub gradient_residual: f64,
    pub iterations: usize,
}

impl TwistSample {
    pub fn twist_radius_mm(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|p| p.twist_radius_mm)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwistCurve {
    pub samples: Vec<TwistSample>,
}

impl TwistCurve {
    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| s.outcome.is_err()).count()
    }

    /// Whether the radius never increases with pressure over the samples
    /// past the pre-loop regime. `None` when fewer than two such samples
    /// solved.
    pub fn is_monotone_decreasing(&self) -> Option<bool> {
        let radii: Vec<f64> = self
            .samples
            .iter()
            .filter(|s| !s.pre_loop)
            .filter_map(TwistSample::twist_radius_mm)
            .collect();
        (radii.len() >= 2).then(|| radii.windows(2).all(|w| w[1] <= w[0]))
    }
}

/// How each sample of a sweep is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartStrategy {
    /// Seed from the previous successful sample.
    #[default]
    Continuation,
    /// Independent cold solve per sample.
    Cold,
}

fn validate_pressures(pressures: &[f64]) -> Result<(), ModelError> {
    if let Some(&p) = pressures.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(ModelError::InvalidPressure(p));
    }
    if pressures.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ModelError::InvalidSweep("pressures must be strictly increasing".into()));
    }
    Ok(())
}

/// Radius at every pressure of a sweep, warm-started sample to sample.
/// A failing sample is recorded and the sweep carries on.
pub fn predict_twist_curve(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    pressures: &[f64],
) -> Result<TwistCurve, ModelError> {
    predict_twist_curve_with(geom, mat, pressures, StartStrategy::Continuation)
}

pub fn predict_twist_curve_with(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    pressures: &[f64],
    strategy: StartStrategy,
) -> Result<TwistCurve, ModelError> {
    geom.validate()?;
    mat.validate()?;
    validate_pressures(pressures)?;
    let mut previous: Option<EquilibriumState> = None;
    let mut samples = Vec::with_capacity(pressures.len());
    for &p in pressures {
        let init = match strategy {
            StartStrategy::Continuation => previous.as_ref(),
            StartStrategy::Cold => None,
        };
        let outcome = solve_equilibrium(geom, mat, p, init).map(|sol| {
            let radius = twist_radius(&sol.state).unwrap_or(f64::INFINITY);
            TwistPoint {
                state: sol.state,
                twist_radius_mm: radius,
                gradient_residual: sol.diagnostics.residual,
                iterations: sol.diagnostics.iterations,
            }
        });
        if let Ok(point) = &outcome {
            previous = Some(point.state);
        }
        samples.push(TwistSample {
            pressure_kpa: p,
            pre_loop: is_pre_loop(p),
            outcome,
        });
    }
    Ok(TwistCurve { samples })
}
