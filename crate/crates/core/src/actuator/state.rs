use std::f64::consts::PI;

/// The seven unknowns of the equilibrium problem.
///
/// Vector form (see [`Self::to_array`]) orders them strain block first:
/// `[e11, e22, e33, k1, k2, q, phi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EquilibriumState {
    pub e11: f64,
    pub e22: f64,
    pub e33: f64,
    /// Curvatures, 1/mm.
    pub k1: f64,
    pub k2: f64,
    /// Phase angle of the principal strain frame, radians.
    pub phi: f64,
    /// Gradient of the third strain component along x3, 1/mm.
    pub q: f64,
}

pub const STATE_DIM: usize = 7;
pub const STRAIN_DIM: usize = 6;
pub const PHI_INDEX: usize = 6;

impl EquilibriumState {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [self.e11, self.e22, self.e33, self.k1, self.k2, self.q, self.phi]
    }

    pub fn from_array(v: [f64; STATE_DIM]) -> Self {
        Self {
            e11: v[0],
            e22: v[1],
            e33: v[2],
            k1: v[3],
            k2: v[4],
            q: v[5],
            phi: v[6],
        }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        let mut a = [0.0; STATE_DIM];
        a.copy_from_slice(&v[..STATE_DIM]);
        Self::from_array(a)
    }

    /// `[e11, e22, e33]`
    pub fn membrane(&self) -> [f64; 3] {
        [self.e11, self.e22, self.e33]
    }

    /// `[k1, k2, q]`, the x3-gradients of the three strain components.
    pub fn gradients(&self) -> [f64; 3] {
        [self.k1, self.k2, self.q]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Same state with `phi` wrapped into `[0, pi)`. The energy depends on
    /// the phase only through `2 phi`.
    pub fn normalized(mut self) -> Self {
        self.phi = normalize_phase(self.phi);
        self
    }
}

pub fn normalize_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(PI);
    if w >= PI {
        0.0
    } else {
        w
    }
}
