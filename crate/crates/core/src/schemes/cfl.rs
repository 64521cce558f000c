//! Time-step limits of the explicit scheme.
//!
//! The entropy CFL conditions involve `φ''` at unknown intermediate points
//! between the old and new cell values. They are bounded here by the extrema
//! of `φ''` over the stencil range of the old values, widened by the relative
//! margin `cfl_margin`. The step driver checks afterwards that the new values
//! stayed inside that window, and shrinks the step otherwise.

use crate::entropy::{second_range, ConvexFunction, PhiE, PhiRho};
use crate::math::{abs, neg_part, powf, sqrt};
use crate::mesh::Mesh;
use crate::{Error, Result};

use super::explicit::explicit_mass_step;
use super::{explicit_step, MassUpdate, SchemeConfig, State, StepOutcome, VelocityMode};

const MAX_ATTEMPTS: usize = 60;

fn window(mesh: &Mesh, x: &[f64], k: usize, margin: f64) -> (f64, f64) {
    let (lo, hi) = mesh.cell(k).faces.iter().fold((x[k], x[k]), |(lo, hi), &s| {
        match mesh.neighbor(k, s) {
            Some(l) => (lo.min(x[l]), hi.max(x[l])),
            None => (lo, hi),
        }
    });
    (lo / (1.0 + margin), hi * (1.0 + margin))
}

fn in_window(mesh: &Mesh, old: &[f64], new: &[f64], margin: f64) -> bool {
    (0..mesh.n_cells()).all(|k| {
        let (lo, hi) = window(mesh, old, k, margin);
        new[k] >= lo && new[k] <= hi
    })
}

/// `safety · min_K numer_K · min φ'' / Σ_σ [max φ''² / min_σ φ''] inflow_{K,σ}`.
fn entropy_limit(
    mesh: &Mesh,
    phi: &dyn ConvexFunction,
    x: &[f64],
    numer: impl Fn(usize) -> f64,
    inflow: impl Fn(usize, usize) -> f64,
    config: &SchemeConfig,
) -> Result<f64> {
    let mut dt = f64::INFINITY;
    for k in 0..mesh.n_cells() {
        let (lo, hi) = window(mesh, x, k, config.cfl_margin);
        let (s_min, s_max) = second_range(phi, lo, hi)?;
        let mut denom = 0.0;
        for &s in &mesh.cell(k).faces {
            let Some(l) = mesh.neighbor(k, s) else { continue };
            let w = inflow(k, s);
            if w > 0.0 {
                let (face_min, _) = second_range(phi, x[k], x[l])?;
                denom += s_max * s_max / face_min * w;
            }
        }
        if denom > 0.0 {
            dt = dt.min(numer(k) * s_min / denom);
        }
    }
    Ok(config.cfl_safety * dt)
}

/// Time-step limit making `R₁ + R₂ + R₀₂ ≥ 0` for upwind densities.
/// Returns `+∞` when no cell has an inflow face.
pub fn cfl_dt_mass(mesh: &Mesh, state: &State, config: &SchemeConfig) -> Result<f64> {
    entropy_limit(
        mesh,
        &PhiRho,
        &state.rho,
        |k| mesh.cell(k).measure,
        |k, s| mesh.face(s).measure * neg_part(state.normal_velocity(mesh, k, s)),
        config,
    )
}

/// Time-step limit making `R₁ + R₂ + R ≥ 0` for upwind internal energies.
pub fn cfl_dt_energy(
    mesh: &Mesh,
    state: &State,
    mass: &MassUpdate,
    config: &SchemeConfig,
) -> Result<f64> {
    entropy_limit(
        mesh,
        &PhiE::new(config.gas),
        &state.e,
        |k| mesh.cell(k).measure * mass.rho[k],
        |k, s| neg_part(mesh.orientation(k, s) * mass.fluxes[s]),
        config,
    )
}

/// Acoustic limit `h_K / (|u| + c_K)`, plus the explicit diffusion limit of
/// the momentum stabilization in 1D.
pub fn acoustic_dt(mesh: &Mesh, state: &State, config: &SchemeConfig) -> Result<f64> {
    let g = config.gas.gamma();
    let mut dt = f64::INFINITY;
    for (k, cell) in mesh.cells().iter().enumerate() {
        let c = sqrt(g * (g - 1.0) * state.e[k]);
        let u = cell.faces.iter().map(|&s| abs(state.u[s])).fold(0.0, f64::max);
        dt = dt.min(cell.diameter / (u + c));
    }
    let stab = config.stabilization;
    if stab.enabled && mesh.dim() == 1 {
        let h_alpha = powf(mesh.h_max(), stab.alpha);
        let stiffness = |k: usize| {
            let cell = mesh.cell(k);
            let du = abs(state.u[cell.faces[1]] - state.u[cell.faces[0]]);
            (stab.q - 1.0) * powf(du, stab.q - 2.0) / powf(cell.diameter, stab.q - 1.0)
        };
        for (_, k, l) in mesh.interior_faces() {
            let (mk, ml) = (mesh.cell(k).measure, mesh.cell(l).measure);
            let dual_mass = 0.5 * (mk * state.rho[k] + ml * state.rho[l]);
            let coef = h_alpha * (stiffness(k) + stiffness(l));
            if coef > 0.0 {
                dt = dt.min(dual_mass / coef);
            }
        }
    }
    Ok(config.cfl_safety * dt)
}

/// An explicit step with its CFL bookkeeping.
#[derive(Clone, Debug)]
pub struct CflStep {
    pub outcome: StepOutcome,
    pub dt_mass: f64,
    pub dt_energy: f64,
    pub attempts: usize,
}

/// One explicit step with `δt = min(dt_cap, cfl_dt_mass, cfl_dt_energy)`.
///
/// The energy limit depends on the new densities, hence on `δt` itself; the
/// step is recomputed until it satisfies both limits and the new cell values
/// lie in the windows the limits were computed on.
pub fn explicit_cfl_step(
    mesh: &Mesh,
    state: &State,
    config: &SchemeConfig,
    velocity: &VelocityMode,
    dt_cap: f64,
) -> Result<CflStep> {
    let dt_mass = cfl_dt_mass(mesh, state, config)?;
    let mut dt = dt_mass.min(dt_cap);
    if *velocity == VelocityMode::Evolved1d {
        dt = dt.min(acoustic_dt(mesh, state, config)?);
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig("no finite time step: set an explicit cap"));
    }
    let margin = config.cfl_margin;
    for attempt in 1..=MAX_ATTEMPTS {
        let mass = match explicit_mass_step(mesh, state, dt, config) {
            Ok(m) => m,
            Err(Error::Positivity { .. }) => {
                dt *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !in_window(mesh, &state.rho, &mass.rho, margin) {
            dt *= 0.5;
            continue;
        }
        let dt_energy = cfl_dt_energy(mesh, state, &mass, config)?;
        if dt > dt_energy {
            dt = if attempt == 1 { dt_energy } else { 0.95 * dt_energy };
            continue;
        }
        let outcome = match explicit_step(mesh, state, dt, config, velocity) {
            Ok(o) => o,
            Err(Error::Positivity { .. }) => {
                dt *= 0.5;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !in_window(mesh, &state.e, &outcome.state.e, margin) {
            dt *= 0.5;
            continue;
        }
        return Ok(CflStep {
            outcome,
            dt_mass,
            dt_energy,
            attempts: attempt,
        });
    }
    Err(Error::InvalidConfig("explicit step could not satisfy its CFL limits"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::GasParameters;
    use crate::face_values::FaceStrategy;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn config(gamma: f64, safety: f64, margin: f64) -> SchemeConfig {
        let mut c = SchemeConfig::new(
            GasParameters::new(gamma).unwrap(),
            FaceStrategy::Upwind,
            FaceStrategy::Upwind,
        );
        c.cfl_safety = safety;
        c.cfl_margin = margin;
        c
    }

    #[test]
    fn mass_limit_by_hand() {
        // two unit cells, the face velocity enters cell 1 at speed 2
        let mesh = Mesh::build_1d(2, 2.0).unwrap();
        let c = config(1.4, 1.0, 0.0);
        let s = State::new(&mesh, vec![1.0; 2], vec![1.0; 2], vec![0.0, 2.0, 0.0], c.gas).unwrap();
        assert_abs_diff_eq!(cfl_dt_mass(&mesh, &s, &c).unwrap(), 0.5, epsilon = 1e-15);
        let c2 = config(1.4, 0.5, 0.0);
        assert_abs_diff_eq!(cfl_dt_mass(&mesh, &s, &c2).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn no_inflow_means_no_limit() {
        let mesh = Mesh::build_1d(1, 1.0).unwrap();
        let c = config(1.4, 1.0, 0.1);
        let s = State::new(&mesh, vec![1.0], vec![1.0], vec![0.0; 2], c.gas).unwrap();
        assert_eq!(cfl_dt_mass(&mesh, &s, &c).unwrap(), f64::INFINITY);
    }

    #[test]
    fn energy_limit_by_hand() {
        // γ = 2 gives φ_e'' = 1 at e = 1; the face carries F = 2 into cell 1
        let mesh = Mesh::build_1d(2, 2.0).unwrap();
        let c = config(2.0, 1.0, 0.0);
        let s = State::new(&mesh, vec![1.0; 2], vec![1.0; 2], vec![0.0, 2.0, 0.0], c.gas).unwrap();
        let mass = MassUpdate {
            rho: vec![1.0; 2],
            faces: vec![],
            fluxes: vec![0.0, 2.0, 0.0],
        };
        assert_abs_diff_eq!(cfl_dt_energy(&mesh, &s, &mass, &c).unwrap(), 0.5, epsilon = 1e-15);
        let doubled = MassUpdate {
            fluxes: vec![0.0, 4.0, 0.0],
            ..mass
        };
        assert_abs_diff_eq!(cfl_dt_energy(&mesh, &s, &doubled, &c).unwrap(), 0.25, epsilon = 1e-15);
    }
}
