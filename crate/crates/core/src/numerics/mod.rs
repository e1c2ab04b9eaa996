//! Numerical kernels: quadrature, dense solves, Newton drivers, finite
//! differences, circle fitting and 3D convex hulls.

mod circle;
mod diff;
mod hull;
mod linalg;
mod newton;
mod quadrature;

pub use circle::{fit_circle_2d, Circle2D};
pub use diff::finite_diff_gradient;
pub use hull::{convex_hull_3d, hull_volume, Hull3D, Point3};
pub use linalg::{is_positive_definite, solve_general, solve_symmetric};
pub use newton::{newton_minimize, newton_stationary, NewtonReport, SolverSettings};
pub use quadrature::{base_rule, doubled_rule, integrate_1d, GaussLegendre, BASE_ORDER, DOUBLING_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("quadrature did not converge (relative change {relative_change:e} on doubling)")]
    QuadratureNotConverged { relative_change: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    IndefiniteMatrix,
    #[error("linear solve residual {residual:e} exceeds tolerance")]
    IllConditioned { residual: f64 },
    #[error("singular Jacobian")]
    SingularJacobian,
    #[error("Newton iteration stopped after {iterations} iterations with residual {residual:e}")]
    NotConverged {
        best: Vec<f64>,
        residual: f64,
        iterations: usize,
    },
    #[error("invalid solver settings: {0}")]
    InvalidSettings(&'static str),
    #[error("degenerate input: {0}")]
    Degenerate(String),
}
