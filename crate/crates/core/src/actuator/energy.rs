//! Strain measures, elastic energies and the total potential of one
//! actuator chamber assembly.
//!
//! The cross-section has a flat part of width `W` over `0 <= x3 <= t` and
//! a curved part over `r - t <= x3 <= r` whose width at height `x3` is
//! `2 sqrt(r^2 - x3^2)`. Both energies are per chamber (length `p`), and
//! the total potential multiplies by the `n + 1` chambers.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use super::geometry::{ActuatorGeometry, MaterialModel};
use super::state::{EquilibriumState, PHI_INDEX, STATE_DIM, STRAIN_DIM};
use super::ModelError;
use crate::numerics::integrate_1d;

/// Principal strains at height `x3` above the reference surface.
pub fn strain_components(state: &EquilibriumState, x3: f64) -> [f64; 3] {
    let e = state.membrane();
    let k = state.gradients();
    [e[0] + x3 * k[0], e[1] + x3 * k[1], e[2] + x3 * k[2]]
}

/// First and second strain invariants `(J1, J2)`.
pub fn strain_invariants(eps: [f64; 3]) -> (f64, f64) {
    let j1 = eps[0] + eps[1] + eps[2];
    let j2 = eps[0] * eps[0] + eps[1] * eps[1] + eps[2] * eps[2];
    (j1, j2)
}

/// Strain energy per unit volume, kPa (= mJ/mm^3).
pub fn strain_energy_density(j1: f64, j2: f64, mat: &MaterialModel) -> f64 {
    mat.shear_coefficient() * j2 + mat.volumetric_coefficient() * j1 * j1
}

fn density_at(state: &EquilibriumState, mat: &MaterialModel, x3: f64) -> f64 {
    let (j1, j2) = strain_invariants(strain_components(state, x3));
    strain_energy_density(j1, j2, mat)
}

fn validate(geom: &ActuatorGeometry, mat: &MaterialModel) -> Result<(), ModelError> {
    geom.validate()?;
    mat.validate()
}

/// Lower limit of the angle substitution `x3 = r sin(u)` used on the
/// curved part. The substitution turns the square-root width into the
/// smooth `2 r cos(u)` so the fixed-order rule converges.
fn curved_part_angle(geom: &ActuatorGeometry) -> f64 {
    let r = geom.outer_radius_mm;
    ((r - geom.wall_thickness_mm) / r).asin()
}

/// Integrates `f(x3) * width(x3)` over the curved part.
fn integrate_curved<F: Fn(f64) -> f64>(geom: &ActuatorGeometry, f: F) -> Result<f64, ModelError> {
    let r = geom.outer_radius_mm;
    let v = integrate_1d(
        |u| {
            let c = u.cos();
            f(r * u.sin()) * 2.0 * r * r * c * c
        },
        curved_part_angle(geom),
        FRAC_PI_2,
    )?;
    Ok(v)
}

/// Elastic energy stored in the flat part of one chamber, mJ.
pub fn elastic_energy_part1(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
) -> Result<f64, ModelError> {
    validate(geom, mat)?;
    let strip = geom.pitch_mm * geom.part1_width_mm / geom.fiber_angle_rad.cos();
    let inner = integrate_1d(|x3| density_at(state, mat, x3), 0.0, geom.wall_thickness_mm)?;
    Ok(strip * inner)
}

/// Elastic energy stored in the curved part of one chamber, mJ.
pub fn elastic_energy_part2(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
) -> Result<f64, ModelError> {
    validate(geom, mat)?;
    Ok(geom.pitch_mm * integrate_curved(geom, |x3| density_at(state, mat, x3))?)
}

/// `c P h1 (W / sin θ) p`, the pressure work per unit mid-surface strain.
pub fn pressure_load(geom: &ActuatorGeometry, mat: &MaterialModel, pressure_kpa: f64) -> Result<f64, ModelError> {
    if !(pressure_kpa >= 0.0 && pressure_kpa.is_finite()) {
        return Err(ModelError::InvalidPressure(pressure_kpa));
    }
    let s = geom.fiber_angle_rad.sin();
    if s.abs() < 1e-12 {
        return Err(ModelError::DegenerateGeometry("fiber angle is zero"));
    }
    Ok(mat.correction_factor * pressure_kpa * geom.chamber_height_mm * geom.part1_width_mm / s * geom.pitch_mm)
}

/// Work done by the pressure in one chamber, mJ. Strains are taken on the
/// reference surface (`x3 = 0`), which keeps the work linear in them.
pub fn pressure_work(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
    pressure_kpa: f64,
) -> Result<f64, ModelError> {
    let load = pressure_load(geom, mat, pressure_kpa)?;
    let (s, c) = (geom.fiber_angle_rad - state.phi).sin_cos();
    Ok(load * (state.e11 * s * s + state.e22 * c * c))
}

/// Total potential `(n + 1) (W_m1 + W_m2 - W_F)`, mJ.
pub fn total_potential(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
    pressure_kpa: f64,
) -> Result<f64, ModelError> {
    let wm = elastic_energy_part1(geom, mat, state)? + elastic_energy_part2(geom, mat, state)?;
    let wf = pressure_work(geom, mat, state, pressure_kpa)?;
    Ok(geom.chamber_count() * (wm - wf))
}

/// Width-weighted moments `m_k = p ∫ x3^k width(x3) dx3` over the whole
/// section. The elastic energy is a quadratic form in the strain block
/// whose entries are these three numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionMoments {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl SectionMoments {
    pub fn new(geom: &ActuatorGeometry) -> Result<Self, ModelError> {
        geom.validate()?;
        let strip = geom.part1_width_mm / geom.fiber_angle_rad.cos();
        let t = geom.wall_thickness_mm;
        let mut m = [0.0; 3];
        for (k, slot) in m.iter_mut().enumerate() {
            let flat = strip * integrate_1d(|x| x.powi(k as i32), 0.0, t)?;
            let curved = integrate_curved(geom, |x| x.powi(k as i32))?;
            *slot = geom.pitch_mm * (flat + curved);
        }
        Ok(Self { m0: m[0], m1: m[1], m2: m[2] })
    }
}

/// Hessian of the total potential with respect to the strain block
/// `[e11, e22, e33, k1, k2, q]`. It depends on neither the state nor the
/// pressure.
pub fn strain_hessian(geom: &ActuatorGeometry, mat: &MaterialModel) -> Result<DMatrix<f64>, ModelError> {
    validate(geom, mat)?;
    let mom = SectionMoments::new(geom)?;
    Ok(strain_hessian_from(&mom, geom, mat))
}

fn strain_hessian_from(mom: &SectionMoments, geom: &ActuatorGeometry, mat: &MaterialModel) -> DMatrix<f64> {
    let a = mat.shear_coefficient();
    let b = mat.volumetric_coefficient();
    let scale = geom.chamber_count();
    let m = [[mom.m0, mom.m1], [mom.m1, mom.m2]];
    DMatrix::from_fn(STRAIN_DIM, STRAIN_DIM, |i, j| {
        let (bi, ci) = (i / 3, i % 3);
        let (bj, cj) = (j / 3, j % 3);
        let diag = if ci == cj { 2.0 * a } else { 0.0 };
        scale * (diag + 2.0 * b) * m[bi][bj]
    })
}

/// Gradient of [`total_potential`] in state-array order
/// `[e11, e22, e33, k1, k2, q, phi]`.
pub fn potential_gradient(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
    pressure_kpa: f64,
) -> Result<[f64; STATE_DIM], ModelError> {
    validate(geom, mat)?;
    let mom = SectionMoments::new(geom)?;
    let load = pressure_load(geom, mat, pressure_kpa)?;
    Ok(gradient_from(&mom, load, geom, mat, state))
}

fn gradient_from(
    mom: &SectionMoments,
    load: f64,
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
) -> [f64; STATE_DIM] {
    let a = mat.shear_coefficient();
    let b = mat.volumetric_coefficient();
    let e = state.membrane();
    let k = state.gradients();
    let e_sum: f64 = e.iter().sum();
    let k_sum: f64 = k.iter().sum();
    let mut g = [0.0; STATE_DIM];
    for i in 0..3 {
        g[i] = 2.0 * a * (e[i] * mom.m0 + k[i] * mom.m1) + 2.0 * b * (e_sum * mom.m0 + k_sum * mom.m1);
        g[i + 3] = 2.0 * a * (e[i] * mom.m1 + k[i] * mom.m2) + 2.0 * b * (e_sum * mom.m1 + k_sum * mom.m2);
    }
    let delta = geom.fiber_angle_rad - state.phi;
    let (s, c) = delta.sin_cos();
    g[0] -= load * s * s;
    g[1] -= load * c * c;
    g[PHI_INDEX] = -load * (2.0 * delta).sin() * (state.e22 - state.e11);
    let scale = geom.chamber_count();
    g.map(|v| scale * v)
}

/// Full 7x7 Hessian of the total potential, state-array order.
pub fn potential_hessian(
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
    pressure_kpa: f64,
) -> Result<DMatrix<f64>, ModelError> {
    validate(geom, mat)?;
    let mom = SectionMoments::new(geom)?;
    let load = pressure_load(geom, mat, pressure_kpa)?;
    Ok(hessian_from(&mom, load, geom, mat, state))
}

fn hessian_from(
    mom: &SectionMoments,
    load: f64,
    geom: &ActuatorGeometry,
    mat: &MaterialModel,
    state: &EquilibriumState,
) -> DMatrix<f64> {
    let scale = geom.chamber_count();
    let mut h = DMatrix::zeros(STATE_DIM, STATE_DIM);
    h.view_mut((0, 0), (STRAIN_DIM, STRAIN_DIM))
        .copy_from(&strain_hessian_from(mom, geom, mat));
    let delta = geom.fiber_angle_rad - state.phi;
    let s2 = (2.0 * delta).sin();
    let c2 = (2.0 * delta).cos();
    h[(PHI_INDEX, 0)] = scale * load * s2;
    h[(0, PHI_INDEX)] = h[(PHI_INDEX, 0)];
    h[(PHI_INDEX, 1)] = -scale * load * s2;
    h[(1, PHI_INDEX)] = h[(PHI_INDEX, 1)];
    h[(PHI_INDEX, PHI_INDEX)] = 2.0 * scale * load * c2 * (state.e22 - state.e11);
    h
}

/// Precomputed pieces of the potential for one geometry, material and
/// pressure. Avoids repeating the section quadrature inside solver loops.
#[derive(Debug, Clone)]
pub struct Potential {
    pub geometry: ActuatorGeometry,
    pub material: MaterialModel,
    pub pressure_kpa: f64,
    moments: SectionMoments,
    load: f64,
}

impl Potential {
    pub fn new(geometry: &ActuatorGeometry, material: &MaterialModel, pressure_kpa: f64) -> Result<Self, ModelError> {
        validate(geometry, material)?;
        Ok(Self {
            geometry: *geometry,
            material: *material,
            pressure_kpa,
            moments: SectionMoments::new(geometry)?,
            load: pressure_load(geometry, material, pressure_kpa)?,
        })
    }

    pub fn moments(&self) -> SectionMoments {
        self.moments
    }

    /// `c P h1 (W / sin θ) p`
    pub fn load(&self) -> f64 {
        self.load
    }

    /// Value by direct quadrature of the energy density.
    pub fn value(&self, state: &EquilibriumState) -> Result<f64, ModelError> {
        total_potential(&self.geometry, &self.material, state, self.pressure_kpa)
    }

    /// Same value assembled from the section moments; agrees with
    /// [`Self::value`] to quadrature accuracy and is cheaper.
    pub fn value_from_moments(&self, state: &EquilibriumState) -> f64 {
        let x = DVector::from_column_slice(&state.to_array()[..STRAIN_DIM]);
        let h = strain_hessian_from(&self.moments, &self.geometry, &self.material);
        let (s, c) = (self.geometry.fiber_angle_rad - state.phi).sin_cos();
        let work = self.load * (state.e11 * s * s + state.e22 * c * c);
        0.5 * x.dot(&(h * &x)) - self.geometry.chamber_count() * work
    }

    pub fn gradient(&self, state: &EquilibriumState) -> [f64; STATE_DIM] {
        gradient_from(&self.moments, self.load, &self.geometry, &self.material, state)
    }

    pub fn hessian(&self, state: &EquilibriumState) -> DMatrix<f64> {
        hessian_from(&self.moments, self.load, &self.geometry, &self.material, state)
    }

    pub fn strain_hessian(&self) -> DMatrix<f64> {
        strain_hessian_from(&self.moments, &self.geometry, &self.material)
    }
}
