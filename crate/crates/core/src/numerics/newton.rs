//! Damped Newton iterations for stationary points and minima.

use nalgebra::{DMatrix, DVector};

use super::linalg::solve_general;
use super::NumericsError;

/// Tolerances and limits shared by the Newton drivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Convergence threshold on the max-norm of the (caller-scaled) gradient.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// Relative step used for finite-difference Jacobians.
    pub fd_step: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            gradient_tol: 1e-8,
            max_iterations: 200,
            fd_step: 1e-6,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.gradient_tol > 0.0) {
            return Err(NumericsError::InvalidSettings("gradient_tol must be positive"));
        }
        if self.max_iterations < 1 {
            return Err(NumericsError::InvalidSettings("max_iterations must be at least 1"));
        }
        if !(self.fd_step > 0.0) {
            return Err(NumericsError::InvalidSettings("fd_step must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Max-norm of the gradient at the returned point.
    pub residual: f64,
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1.0 / (1u64 << 40) as f64;

fn max_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn check_finite(v: &DVector<f64>, what: &'static str) -> Result<(), NumericsError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(NumericsError::NonFinite(what))
    }
}

/// Central-difference Jacobian of a vector field.
fn fd_jacobian<G>(grad: &mut G, x: &DVector<f64>, step: f64) -> Result<DMatrix<f64>, NumericsError>
where
    G: FnMut(&DVector<f64>) -> Result<DVector<f64>, NumericsError>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = x.clone();
    for j in 0..n {
        let h = step * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        let fp = grad(&probe)?;
        probe[j] = x[j] - h;
        let fm = grad(&probe)?;
        probe[j] = x[j];
        jac.set_column(j, &((fp - fm) / (2.0 * h)));
    }
    Ok(jac)
}

/// Solves `grad(x) = 0` by Newton's method with a finite-difference
/// Jacobian, damped by step halving on the merit `0.5 * |grad|^2`.
///
/// Positive rescaling of `grad` leaves the iterates unchanged.
pub fn newton_stationary<G>(
    mut grad: G,
    seed: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<(DVector<f64>, NewtonReport), NumericsError>
where
    G: FnMut(&DVector<f64>) -> Result<DVector<f64>, NumericsError>,
{
    settings.validate()?;
    let mut x = seed.clone();
    let mut g = grad(&x)?;
    check_finite(&g, "gradient at seed")?;
    let mut residual = max_norm(&g);
    let mut iterations = 0;

    while residual >= settings.gradient_tol {
        if iterations == settings.max_iterations {
            return Err(NumericsError::NotConverged {
                best: x.iter().copied().collect(),
                residual,
                iterations,
            });
        }
        iterations += 1;
        let jac = fd_jacobian(&mut grad, &x, settings.fd_step)?;
        let step = match solve_general(&jac, &(-&g)) {
            Some(s) => s,
            None => jac
                .clone()
                .svd(true, true)
                .solve(&(-&g), 1e-14 * jac.amax())
                .map_err(|_| NumericsError::SingularJacobian)?,
        };
        let merit = 0.5 * g.norm_squared();
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut best_trial: Option<(f64, DVector<f64>, DVector<f64>)> = None;
        while lambda >= MIN_STEP {
            let trial = &x + &step * lambda;
            let gt = grad(&trial)?;
            if gt.iter().all(|v| v.is_finite()) {
                let mt = 0.5 * gt.norm_squared();
                if mt <= (1.0 - 2.0 * ARMIJO * lambda) * merit {
                    accepted = Some((trial, gt));
                    break;
                }
                if best_trial.as_ref().is_none_or(|(m, _, _)| mt < *m) {
                    best_trial = Some((mt, trial, gt));
                }
            }
            lambda *= 0.5;
        }
        let (nx, ng) = match accepted {
            Some(pair) => pair,
            None => match best_trial {
                Some((mt, t, gt)) if mt < merit => (t, gt),
                _ => {
                    return Err(NumericsError::NotConverged {
                        best: x.iter().copied().collect(),
                        residual,
                        iterations,
                    })
                }
            },
        };
        x = nx;
        g = ng;
        residual = max_norm(&g);
    }
    Ok((x, NewtonReport { iterations, residual }))
}

/// Minimizes `f` by Newton's method with an analytic Hessian.
///
/// The Hessian is shifted by a multiple of the identity until it admits a
/// Cholesky factorization, so every step is a descent direction, and the
/// step length is halved until an Armijo decrease in `f` holds. Saddle
/// points of `f` repel the iteration, unlike [`newton_stationary`].
pub fn newton_minimize<F, G, H>(
    mut f: F,
    mut grad: G,
    mut hess: H,
    seed: &DVector<f64>,
    settings: &SolverSettings,
) -> Result<(DVector<f64>, NewtonReport), NumericsError>
where
    F: FnMut(&DVector<f64>) -> Result<f64, NumericsError>,
    G: FnMut(&DVector<f64>) -> Result<DVector<f64>, NumericsError>,
    H: FnMut(&DVector<f64>) -> Result<DMatrix<f64>, NumericsError>,
{
    settings.validate()?;
    let n = seed.len();
    let mut x = seed.clone();
    let mut fx = f(&x)?;
    let mut g = grad(&x)?;
    check_finite(&g, "gradient at seed")?;
    let mut residual = max_norm(&g);
    let mut iterations = 0;

    while residual >= settings.gradient_tol {
        if iterations == settings.max_iterations {
            return Err(NumericsError::NotConverged {
                best: x.iter().copied().collect(),
                residual,
                iterations,
            });
        }
        iterations += 1;
        let h = hess(&x)?;
        let h = (&h + h.transpose()) * 0.5;
        let diag_scale = h.diagonal().amax().max(1.0);
        let mut shift = 0.0;
        let chol = loop {
            let shifted = &h + DMatrix::identity(n, n) * shift;
            if let Some(c) = shifted.cholesky() {
                break c;
            }
            shift = if shift == 0.0 { 1e-10 * diag_scale } else { shift * 10.0 };
            if shift > 1e20 * diag_scale {
                return Err(NumericsError::SingularJacobian);
            }
        };
        let dir = chol.solve(&(-&g));
        let slope = g.dot(&dir);
        // Below this predicted decrease, changes in f are rounding noise and
        // the Armijo test would accept arbitrary tiny steps.
        let flat = -slope <= 64.0 * f64::EPSILON * fx.abs().max(1.0);
        let mut moved = false;
        let mut lambda = 1.0;
        while !flat && lambda >= MIN_STEP {
            let trial = &x + &dir * lambda;
            let ft = f(&trial)?;
            if ft.is_finite() && ft <= fx + ARMIJO * lambda * slope {
                x = trial;
                fx = ft;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !moved {
            // judge steps by the gradient instead
            let mut lambda = 1.0;
            while lambda >= MIN_STEP {
                let trial = &x + &dir * lambda;
                let gt = grad(&trial)?;
                if gt.iter().all(|v| v.is_finite()) && max_norm(&gt) < residual {
                    fx = f(&trial)?;
                    x = trial;
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if !moved {
            return Err(NumericsError::NotConverged {
                best: x.iter().copied().collect(),
                residual,
                iterations,
            });
        }
        g = grad(&x)?;
        check_finite(&g, "gradient")?;
        residual = max_norm(&g);
    }
    Ok((x, NewtonReport { iterations, residual }))
}
