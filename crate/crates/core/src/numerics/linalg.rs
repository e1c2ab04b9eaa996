//! Dense solves backed by nalgebra.

use nalgebra::{DMatrix, DVector};

use super::NumericsError;

/// Relative residual accepted by [`solve_symmetric`].
pub const SYMMETRIC_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
///
/// Fails with [`NumericsError::IndefiniteMatrix`] when a non-positive pivot
/// shows up during factorization.
pub fn solve_symmetric(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, NumericsError> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(NumericsError::DimensionMismatch {
            expected: n,
            found: if a.ncols() != n { a.ncols() } else { b.len() },
        });
    }
    let scale = a.amax().max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return Err(NumericsError::NotSymmetric);
            }
        }
    }
    let chol = a.clone().cholesky().ok_or(NumericsError::IndefiniteMatrix)?;
    let x = chol.solve(b);
    let residual = (a * &x - b).norm();
    let b_norm = b.norm();
    if residual > SYMMETRIC_RESIDUAL_TOLERANCE * b_norm.max(f64::MIN_POSITIVE) && b_norm > 0.0 {
        return Err(NumericsError::IllConditioned { residual });
    }
    Ok(x)
}

/// True when a Cholesky factorization of the symmetric part exists.
pub fn is_positive_definite(a: &DMatrix<f64>) -> bool {
    let sym = (a + a.transpose()) * 0.5;
    sym.cholesky().is_some()
}

/// General square solve by LU with partial pivoting.
pub fn solve_general(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let x = a.clone().lu().solve(b)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}
