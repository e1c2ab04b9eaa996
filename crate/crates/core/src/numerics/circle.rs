//! Least-squares circle fitting: algebraic seed, geometric refinement.

use nalgebra::{DMatrix, DVector, Matrix2};

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle2D {
    pub center: [f64; 2],
    pub radius: f64,
    /// Root-mean-square radial distance of the points from the circle.
    pub rms_residual: f64,
}

const MAX_GN_ITERATIONS: usize = 100;

/// Fits a circle to planar points.
///
/// The algebraic (Kasa) fit solves a linear least-squares problem in the
/// coefficients of `x^2 + y^2 + D x + E y + F = 0`; Gauss–Newton then
/// minimizes the sum of squared radial distances starting from it.
pub fn fit_circle_2d(points: &[[f64; 2]]) -> Result<Circle2D, NumericsError> {
    if points.len() < 3 {
        return Err(NumericsError::Degenerate(format!(
            "circle fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite("circle fit input"));
    }
    let n = points.len() as f64;
    let mean = points
        .iter()
        .fold([0.0, 0.0], |acc, p| [acc[0] + p[0] / n, acc[1] + p[1] / n]);
    let local: Vec<[f64; 2]> = points.iter().map(|p| [p[0] - mean[0], p[1] - mean[1]]).collect();

    let mut cov = Matrix2::<f64>::zeros();
    for p in &local {
        cov[(0, 0)] += p[0] * p[0];
        cov[(0, 1)] += p[0] * p[1];
        cov[(1, 1)] += p[1] * p[1];
    }
    cov[(1, 0)] = cov[(0, 1)];
    let eig = cov.symmetric_eigen().eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if hi <= 0.0 || lo <= 1e-24 * hi {
        return Err(NumericsError::Degenerate("points are collinear or coincident".into()));
    }

    let a = DMatrix::from_fn(local.len(), 3, |i, j| match j {
        0 => local[i][0],
        1 => local[i][1],
        _ => 1.0,
    });
    let b = DVector::from_fn(local.len(), |i, _| -(local[i][0].powi(2) + local[i][1].powi(2)));
    let coef = a
        .svd(true, true)
        .solve(&b, 1e-15)
        .map_err(|e| NumericsError::Degenerate(e.to_string()))?;
    let mut cx = -0.5 * coef[0];
    let mut cy = -0.5 * coef[1];
    let r2 = cx * cx + cy * cy - coef[2];
    if !(r2 > 0.0) {
        return Err(NumericsError::Degenerate("algebraic fit has no real radius".into()));
    }
    let mut r = r2.sqrt();

    for _ in 0..MAX_GN_ITERATIONS {
        let mut jac = DMatrix::zeros(local.len(), 3);
        let mut res = DVector::zeros(local.len());
        for (i, p) in local.iter().enumerate() {
            let dx = p[0] - cx;
            let dy = p[1] - cy;
            let d = dx.hypot(dy);
            if d == 0.0 {
                return Err(NumericsError::Degenerate("point coincides with circle center".into()));
            }
            res[i] = d - r;
            jac[(i, 0)] = -dx / d;
            jac[(i, 1)] = -dy / d;
            jac[(i, 2)] = -1.0;
        }
        let step = jac
            .svd(true, true)
            .solve(&(-res), 1e-15)
            .map_err(|e| NumericsError::Degenerate(e.to_string()))?;
        cx += step[0];
        cy += step[1];
        r += step[2];
        if step.amax() <= 1e-15 * r.abs().max(1.0) {
            break;
        }
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(NumericsError::Degenerate("geometric fit diverged".into()));
    }
    let ss: f64 = local
        .iter()
        .map(|p| ((p[0] - cx).hypot(p[1] - cy) - r).powi(2))
        .sum();
    Ok(Circle2D {
        center: [cx + mean[0], cy + mean[1]],
        radius: r,
        rms_residual: (ss / n).sqrt(),
    })
}
