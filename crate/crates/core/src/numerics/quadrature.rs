//! Fixed-order Gauss–Legendre quadrature with a doubling convergence check.

use std::sync::OnceLock;

use super::NumericsError;

/// Order of the primary rule.
pub const BASE_ORDER: usize = 32;

/// Maximum relative change between the base rule and the doubled rule,
/// measured against the doubled rule applied to `|f|`.
pub const DOUBLING_TOLERANCE: f64 = 1e-10;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on P_n, seeded with the
    /// Chebyshev-like approximation of the roots.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        half * sum
    }

    /// Mapped abscissae and weights on [a, b], for callers that evaluate
    /// several integrands at the same points.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Shared 32-point rule.
pub fn base_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(BASE_ORDER))
}

/// Shared 64-point rule used for the doubling check.
pub fn doubled_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(2 * BASE_ORDER))
}

/// Integrates `f` over [a, b] with the 32-point rule and confirms the
/// estimate against the 64-point rule.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64, NumericsError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    let coarse = base_rule().integrate(&f, a, b);
    let mut fine = 0.0;
    let mut scale = 0.0;
    for (x, w) in doubled_rule().mapped(a, b) {
        let fx = f(x);
        fine += w * fx;
        scale += w * fx.abs();
    }
    if !(coarse.is_finite() && fine.is_finite()) {
        return Err(NumericsError::NonFinite("quadrature integrand"));
    }
    let change = (coarse - fine).abs();
    if change > DOUBLING_TOLERANCE * scale {
        return Err(NumericsError::QuadratureNotConverged {
            relative_change: if scale > 0.0 { change / scale } else { f64::INFINITY },
        });
    }
    Ok(coarse)
}
