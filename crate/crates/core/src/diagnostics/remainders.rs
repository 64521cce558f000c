//! Per-cell entropy residuals and remainder terms.
//!
//! All remainders are per unit measure: the balance of cell `K` carries
//! `|K| R_K`. Intermediate Taylor points are never needed for the exact forms
//! below; the `mid` and `lower` variants replace `φ''` at the unknown point by
//! its value at the midpoint and by its minimum over the interval.

use alloc::vec;
use alloc::vec::Vec;

use crate::entropy::{bregman, delta_phi, eta, second_range, ConvexFunction, GasParameters, PhiE, PhiRho};
use crate::face_values::FaceValueRecord;
use crate::mesh::Mesh;
use crate::schemes::{State, StepOutcome};
use crate::{CellField, Error, Result};

/// `Σ_{σ∈E(K)} term(K, σ, orientation)` divided by `|K|`, for every cell.
/// Boundary faces carry no flux and are skipped.
fn per_cell(
    mesh: &Mesh,
    mut term: impl FnMut(usize, usize, usize, f64) -> Result<f64>,
) -> Result<CellField> {
    let mut out = vec![0.0; mesh.n_cells()];
    for (k, cell) in mesh.cells().iter().enumerate() {
        let mut acc = 0.0;
        for &s in &cell.faces {
            if let Some(l) = mesh.neighbor(k, s) {
                acc += term(k, l, s, mesh.orientation(k, s))?;
            }
        }
        out[k] = acc / cell.measure;
    }
    Ok(out)
}

fn check_step(mesh: &Mesh, state_n: &State, outcome: &StepOutcome) -> Result<()> {
    mesh.check_cell_field("density", &state_n.rho)?;
    mesh.check_cell_field("new density", &outcome.state.rho)?;
    mesh.check_face_field("velocity", &outcome.u_flux)?;
    mesh.check_face_field("mass fluxes", &outcome.fluxes)?;
    if outcome.rho_faces.len() != mesh.n_faces() || outcome.e_faces.len() != mesh.n_faces() {
        return Err(Error::SizeMismatch {
            what: "face records",
            expected: mesh.n_faces(),
            found: outcome.rho_faces.len().min(outcome.e_faces.len()),
        });
    }
    if !(outcome.dt > 0.0) {
        return Err(Error::InvalidConfig("time step must be positive"));
    }
    Ok(())
}

/// `Σ_K |K| η(ρ_K, e_K)`.
pub fn global_entropy(mesh: &Mesh, state: &State, gas: GasParameters) -> Result<f64> {
    mesh.check_cell_field("density", &state.rho)?;
    mesh.check_cell_field("internal energy", &state.e)?;
    let mut total = 0.0;
    for (k, c) in mesh.cells().iter().enumerate() {
        total += c.measure * eta(state.rho[k], state.e[k], gas)?;
    }
    Ok(total)
}

fn entropy_residual(
    mesh: &Mesh,
    state_n: &State,
    outcome: &StepOutcome,
    gas: GasParameters,
) -> Result<CellField> {
    check_step(mesh, state_n, outcome)?;
    let next = &outcome.state;
    let u = &outcome.u_flux;
    let eta_faces: Vec<f64> = outcome
        .rho_faces
        .iter()
        .zip(&outcome.e_faces)
        .map(|(r, e)| eta(r.value, e.value, gas))
        .collect::<Result<_>>()?;
    let flux = per_cell(mesh, |_, _, s, o| Ok(mesh.face(s).measure * eta_faces[s] * o * u[s]))?;
    let mut out = vec![0.0; mesh.n_cells()];
    for (k, c) in mesh.cells().iter().enumerate() {
        let d = eta(next.rho[k], next.e[k], gas)? - eta(state_n.rho[k], state_n.e[k], gas)?;
        out[k] = c.measure / outcome.dt * d + c.measure * flux[k];
    }
    Ok(out)
}

/// `(|K|/δt)(η_K^{n+1} - η_K^n) + Σ_σ |σ| η_σ^{n+1} u_{K,σ}^{n+1}` for an
/// implicit step, with `η_σ = φ_ρ(ρ_σ) + ρ_σ φ_e(e_σ)` built from the face
/// values the step used.
pub fn entropy_residual_implicit(
    mesh: &Mesh,
    state_n: &State,
    outcome: &StepOutcome,
    gas: GasParameters,
) -> Result<CellField> {
    entropy_residual(mesh, state_n, outcome, gas)
}

/// The same expression for an explicit step, where face values and velocity
/// belong to level `n`. The remainder `|K| (R_η)_K` is not included.
pub fn entropy_residual_explicit(
    mesh: &Mesh,
    state_n: &State,
    outcome: &StepOutcome,
    gas: GasParameters,
) -> Result<CellField> {
    entropy_residual(mesh, state_n, outcome, gas)
}

/// Remainders of an implicit step.
#[derive(Clone, Debug, PartialEq)]
pub struct ImplicitRemainders {
    /// `(1/|K|) Σ |σ| (δφ_ρ)_σ u_{K,σ}`.
    pub delta_rm: CellField,
    /// `(1/|K|) Σ (δφ_e)_σ F_{K,σ}`.
    pub delta_re: CellField,
    /// `[φ_ρ(ρ^n) - φ_ρ(ρ^{n+1}) - φ_ρ'(ρ^{n+1})(ρ^n - ρ^{n+1})] / δt`.
    pub r1_m: CellField,
    /// `(1/|K|) Σ |σ| [φ_ρ(ρ_K) + φ_ρ'(ρ_K)(ρ_σ - ρ_K) - φ_ρ(ρ_σ)] u_{K,σ}`.
    pub r2_m: CellField,
    /// `ρ^n [φ_e(e^n) - φ_e(e^{n+1}) - φ_e'(e^{n+1})(e^n - e^{n+1})] / δt`.
    pub r1_e: CellField,
    /// `(1/|K|) Σ F_{K,σ} [φ_e(e_K) + φ_e'(e_K)(e_σ - e_K) - φ_e(e_σ)]`.
    pub r2_e: CellField,
}

/// `φ(x_K) + φ'(x_K)(x_σ - x_K) - φ(x_σ)`.
fn face_defect(phi: &dyn ConvexFunction, x_k: f64, x_sigma: f64) -> Result<f64> {
    Ok(phi.eval(x_k)? + phi.deriv(x_k)? * (x_sigma - x_k) - phi.eval(x_sigma)?)
}

fn delta_r(
    mesh: &Mesh,
    phi: &dyn ConvexFunction,
    x: &[f64],
    faces: &[FaceValueRecord],
    weight: impl Fn(usize, f64) -> f64,
) -> Result<CellField> {
    per_cell(mesh, |k, l, s, o| {
        Ok(delta_phi(phi, x[k], x[l], faces[s].value)? * weight(s, o))
    })
}

fn r2(
    mesh: &Mesh,
    phi: &dyn ConvexFunction,
    x: &[f64],
    faces: &[FaceValueRecord],
    weight: impl Fn(usize, f64) -> f64,
) -> Result<CellField> {
    per_cell(mesh, |k, _, s, o| Ok(face_defect(phi, x[k], faces[s].value)? * weight(s, o)))
}

/// Remainders of an implicit step. `δR` fields are meaningful when the face
/// values satisfy the implicit hypotheses; the others for any strategy.
///
/// With the entropy residual `E`, every cell satisfies
/// `E_K + |K| (R₁ + R₂)_m + |K| (R₁ + R₂)_e = φ_e'(e_K^{n+1}) |K| S_K`.
pub fn remainder_implicit(
    mesh: &Mesh,
    state_n: &State,
    outcome: &StepOutcome,
    gas: GasParameters,
) -> Result<ImplicitRemainders> {
    check_step(mesh, state_n, outcome)?;
    let phi_e = PhiE::new(gas);
    let next = &outcome.state;
    let u = &outcome.u_flux;
    let f = &outcome.fluxes;
    let dt = outcome.dt;
    let vel = |s: usize, o: f64| mesh.face(s).measure * o * u[s];
    let flux = |s: usize, o: f64| o * f[s];
    let n = mesh.n_cells();
    let mut r1_m = vec![0.0; n];
    let mut r1_e = vec![0.0; n];
    for k in 0..n {
        r1_m[k] = bregman(&PhiRho, state_n.rho[k], next.rho[k])? / dt;
        r1_e[k] = state_n.rho[k] * bregman(&phi_e, state_n.e[k], next.e[k])? / dt;
    }
    Ok(ImplicitRemainders {
        delta_rm: delta_r(mesh, &PhiRho, &next.rho, &outcome.rho_faces, vel)?,
        delta_re: delta_r(mesh, &phi_e, &next.e, &outcome.e_faces, flux)?,
        r1_m,
        r2_m: r2(mesh, &PhiRho, &next.rho, &outcome.rho_faces, vel)?,
        r1_e,
        r2_e: r2(mesh, &phi_e, &next.e, &outcome.e_faces, flux)?,
    })
}

/// Explicit mass-balance remainders.
#[derive(Clone, Debug, PartialEq)]
pub struct MassRemainders {
    /// `[φ'(ρ^{n+1}) - φ'(ρ^n)] Σ F_{K,σ} / |K|`.
    pub r: CellField,
    /// `R₁` in exact form, `[φ'(ρ^{n+1})(ρ^{n+1} - ρ^n) - φ(ρ^{n+1}) + φ(ρ^n)] / δt`.
    pub r1: CellField,
    /// `R₁` with `φ''` at `(ρ^n + ρ^{n+1})/2`.
    pub r1_mid: CellField,
    /// `R₁` with `φ''` at its minimum over `|[ρ^n, ρ^{n+1}]|`.
    pub r1_lower: CellField,
    pub r2: CellField,
    /// `[φ'(ρ^{n+1}) - φ'(ρ^n)] ρ_K^n Σ |σ| u_{K,σ} / |K|`.
    pub r01: CellField,
    /// `[φ'(ρ^{n+1}) - φ'(ρ^n)] Σ |σ| (ρ_σ - ρ_K^n) u_{K,σ} / |K|`.
    pub r02: CellField,
    /// `(1/|K|) Σ |σ| (δφ_ρ)_σ^n u_{K,σ}^n`.
    pub delta_r2: CellField,
}

/// Explicit internal-energy remainders.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyRemainders {
    /// `[φ'(e^{n+1}) - φ'(e^n)] Σ F (e_σ - e_K^n) / |K|`.
    pub r: CellField,
    /// `ρ^{n+1} [φ(e^n) - φ(e^{n+1}) - φ'(e^{n+1})(e^n - e^{n+1})] / δt`.
    pub r1: CellField,
    pub r1_mid: CellField,
    pub r1_lower: CellField,
    pub r2: CellField,
    /// `(1/|K|) Σ (δφ_e)_σ^n F_{K,σ}^n`.
    pub delta_r2: CellField,
    /// `[φ_e'(e^{n+1}) - φ_e'(e^n)] p^n Σ |σ| u_{K,σ} / |K|`, the change of the
    /// pressure-work coefficient between the two levels.
    pub r_pw: CellField,
}

fn r1_variants(
    phi: &dyn ConvexFunction,
    old: f64,
    new: f64,
    coef: f64,
    dt: f64,
) -> Result<(f64, f64, f64)> {
    let d2 = (new - old) * (new - old);
    let exact = coef * bregman(phi, old, new)? / dt;
    let mid = 0.5 * coef * phi.second(0.5 * (old + new))? * d2 / dt;
    let lower = 0.5 * coef * second_range(phi, old, new)?.0 * d2 / dt;
    Ok((exact, mid, lower))
}

/// Mass remainders of an explicit step; `R = R₀₁ + R₀₂` and, for each cell,
/// `(|K|/δt)(φ(ρ^{n+1}) - φ(ρ^n)) + Σ|σ| φ(ρ_σ) u + (ρφ' - φ)(ρ_K^n) Σ|σ| u
/// + |K| (R₁ + R + R₂) = 0`.
pub fn remainder_explicit_mass(mesh: &Mesh, state_n: &State, outcome: &StepOutcome) -> Result<MassRemainders> {
    check_step(mesh, state_n, outcome)?;
    let phi = PhiRho;
    let (old, new) = (&state_n.rho, &outcome.state.rho);
    let u = &outcome.u_flux;
    let faces = &outcome.rho_faces;
    let vel = |s: usize, o: f64| mesh.face(s).measure * o * u[s];
    let flux_sum = per_cell(mesh, |_, _, s, o| Ok(o * outcome.fluxes[s]))?;
    let div = per_cell(mesh, |_, _, s, o| Ok(vel(s, o)))?;
    let jump_sum = per_cell(mesh, |k, _, s, o| Ok((faces[s].value - old[k]) * vel(s, o)))?;

    let n = mesh.n_cells();
    let mut out = MassRemainders {
        r: vec![0.0; n],
        r1: vec![0.0; n],
        r1_mid: vec![0.0; n],
        r1_lower: vec![0.0; n],
        r2: r2(mesh, &phi, old, faces, vel)?,
        r01: vec![0.0; n],
        r02: vec![0.0; n],
        delta_r2: delta_r(mesh, &phi, old, faces, vel)?,
    };
    for k in 0..n {
        let dd = phi.deriv(new[k])? - phi.deriv(old[k])?;
        out.r[k] = dd * flux_sum[k];
        out.r01[k] = dd * old[k] * div[k];
        out.r02[k] = dd * jump_sum[k];
        (out.r1[k], out.r1_mid[k], out.r1_lower[k]) = r1_variants(&phi, old[k], new[k], 1.0, outcome.dt)?;
    }
    Ok(out)
}

/// Internal-energy remainders of an explicit step. For each cell,
/// `(|K|/δt)(ρφ(e)^{n+1} - ρφ(e)^n) + Σ F φ(e_σ) + φ'(e_K^n) p_K^n Σ|σ| u
/// + |K| (R₁ + R₂ + R + R_pw) = φ'(e_K^{n+1}) |K| S_K`.
pub fn remainder_explicit_energy(
    mesh: &Mesh,
    state_n: &State,
    outcome: &StepOutcome,
    gas: GasParameters,
) -> Result<EnergyRemainders> {
    check_step(mesh, state_n, outcome)?;
    mesh.check_cell_field("pressure", &state_n.p)?;
    let phi = PhiE::new(gas);
    let (old, new) = (&state_n.e, &outcome.state.e);
    let faces = &outcome.e_faces;
    let u = &outcome.u_flux;
    let flux = |s: usize, o: f64| o * outcome.fluxes[s];
    let jump_sum = per_cell(mesh, |k, _, s, o| Ok((faces[s].value - old[k]) * flux(s, o)))?;
    let div = per_cell(mesh, |_, _, s, o| Ok(mesh.face(s).measure * o * u[s]))?;

    let n = mesh.n_cells();
    let mut out = EnergyRemainders {
        r: vec![0.0; n],
        r1: vec![0.0; n],
        r1_mid: vec![0.0; n],
        r1_lower: vec![0.0; n],
        r2: r2(mesh, &phi, old, faces, flux)?,
        delta_r2: delta_r(mesh, &phi, old, faces, flux)?,
        r_pw: vec![0.0; n],
    };
    for k in 0..n {
        let dd = phi.deriv(new[k])? - phi.deriv(old[k])?;
        out.r[k] = dd * jump_sum[k];
        out.r_pw[k] = dd * state_n.p[k] * div[k];
        (out.r1[k], out.r1_mid[k], out.r1_lower[k]) =
            r1_variants(&phi, old[k], new[k], outcome.state.rho[k], outcome.dt)?;
    }
    Ok(out)
}

/// Both sides of the switch between the conservative and the non-conservative
/// form of the discrete convection operator:
///
/// `(|K|/δt)(ρ^{n+1} z^{n+1} - ρ^n z^n) + Σ F z_σ` and
/// `(|K|/δt) ρ^{n+1} (z^{n+1} - z^n) + Σ F (z_σ - z_K^n)`.
///
/// They agree whenever `(ρ^n, ρ^{n+1}, F)` satisfy the discrete mass balance.
#[allow(clippy::too_many_arguments)]
pub fn cons_noncons(
    mesh: &Mesh,
    rho_n: &[f64],
    rho_np1: &[f64],
    z_n: &[f64],
    z_np1: &[f64],
    z_faces: &[f64],
    fluxes: &[f64],
    dt: f64,
) -> Result<(CellField, CellField)> {
    for f in [rho_n, rho_np1, z_n, z_np1] {
        mesh.check_cell_field("cell field", f)?;
    }
    mesh.check_face_field("face values", z_faces)?;
    mesh.check_face_field("mass fluxes", fluxes)?;
    let conv = per_cell(mesh, |_, _, s, o| Ok(o * fluxes[s] * z_faces[s]))?;
    let jump = per_cell(mesh, |k, _, s, o| Ok(o * fluxes[s] * (z_faces[s] - z_n[k])))?;
    let mut lhs = vec![0.0; mesh.n_cells()];
    let mut rhs = vec![0.0; mesh.n_cells()];
    for (k, c) in mesh.cells().iter().enumerate() {
        let m = c.measure;
        lhs[k] = m / dt * (rho_np1[k] * z_np1[k] - rho_n[k] * z_n[k]) + m * conv[k];
        rhs[k] = m / dt * rho_np1[k] * (z_np1[k] - z_n[k]) + m * jump[k];
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face_values::{FaceStrategy, Side};
    use crate::schemes::{explicit_step, implicit_step, SchemeConfig, SolverStats, VelocityMode};
    use approx::assert_abs_diff_eq;

    fn gas() -> GasParameters {
        GasParameters::new(1.4).unwrap()
    }

    fn record(value: f64, upwind: Side) -> FaceValueRecord {
        FaceValueRecord {
            value,
            interval: Some((value, value)),
            upwind,
        }
    }

    #[test]
    fn two_cell_r2_by_hand() {
        // ρ^n = (1, 2), the face velocity points from L to K
        let mesh = Mesh::build_1d(2, 2.0).unwrap();
        let s = State::new(&mesh, vec![1.0, 2.0], vec![1.0; 2], vec![0.0; 3], gas()).unwrap();
        let u = vec![0.0, -1.0, 0.0];
        let rho_faces = vec![record(1.0, Side::K), record(2.0, Side::L), record(2.0, Side::K)];
        let fluxes = vec![0.0, -2.0, 0.0];
        let next = s.clone();
        let outcome = StepOutcome {
            state: next,
            e_faces: vec![record(1.0, Side::K); 3],
            rho_faces,
            fluxes,
            u_flux: u,
            source: vec![0.0; 2],
            dt: 0.1,
            solver: SolverStats::default(),
        };
        let m = remainder_explicit_mass(&mesh, &s, &outcome).unwrap();
        assert_abs_diff_eq!(m.r2[0], 2.0 * core::f64::consts::LN_2 - 1.0, epsilon = 1e-15);
        assert_eq!(m.r2[1], 0.0);
        assert!(m.r1.iter().chain(&m.r).all(|&v| v == 0.0));
    }

    fn bump_state(mesh: &Mesh, u: Vec<f64>) -> State {
        let rho = mesh.cells().iter().map(|c| 1.0 + 0.5 * libm::sin(6.0 * c.centroid[0])).collect();
        let e = mesh.cells().iter().map(|c| 2.0 + libm::cos(4.0 * c.centroid[0])).collect();
        State::new(mesh, rho, e, u, gas()).unwrap()
    }

    fn sine_u(mesh: &Mesh) -> Vec<f64> {
        crate::schemes::VelocityField::Sine { amplitude: 0.7 }.sample(mesh)
    }

    #[test]
    fn stationary_state_has_no_remainders() {
        let mesh = Mesh::build_1d(6, 1.0).unwrap();
        let c = SchemeConfig::new(gas(), FaceStrategy::Upwind, FaceStrategy::Upwind);
        let s = bump_state(&mesh, vec![0.0; 7]);
        let out = explicit_step(&mesh, &s, 0.01, &c, &VelocityMode::Prescribed(vec![0.0; 7])).unwrap();
        let m = remainder_explicit_mass(&mesh, &s, &out).unwrap();
        let e = remainder_explicit_energy(&mesh, &s, &out, gas()).unwrap();
        for f in [&m.r, &m.r1, &m.r2, &m.r01, &m.r02, &e.r, &e.r1, &e.r2, &e.r_pw] {
            assert!(f.iter().all(|&v| v == 0.0));
        }
        let res = entropy_residual_explicit(&mesh, &s, &out, gas()).unwrap();
        assert!(res.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn explicit_decomposition_closes() {
        let mesh = Mesh::build_1d(12, 1.0).unwrap();
        for strategy in [FaceStrategy::Upwind, FaceStrategy::Centered, "limited".parse().unwrap()] {
            let mut c = SchemeConfig::new(gas(), strategy, strategy);
            c.source_e = crate::schemes::EnergySource::Uniform(0.3);
            let u = sine_u(&mesh);
            let s = bump_state(&mesh, u.clone());
            let out = explicit_step(&mesh, &s, 0.004, &c, &VelocityMode::Prescribed(u)).unwrap();
            let res = entropy_residual_explicit(&mesh, &s, &out, gas()).unwrap();
            let m = remainder_explicit_mass(&mesh, &s, &out).unwrap();
            let e = remainder_explicit_energy(&mesh, &s, &out, gas()).unwrap();
            let phi_e = PhiE::new(gas());
            for (k, &res_k) in res.iter().enumerate() {
                let vol = mesh.cell(k).measure;
                let rem = m.r1[k] + m.r[k] + m.r2[k] + e.r1[k] + e.r2[k] + e.r[k] + e.r_pw[k];
                let lhs = res_k + vol * rem;
                let rhs = phi_e.deriv(out.state.e[k]).unwrap() * vol * out.source[k];
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-11);
                assert_abs_diff_eq!(m.r[k], m.r01[k] + m.r02[k], epsilon = 1e-13);
                assert!(m.r1[k] >= 0.0 && e.r1[k] >= 0.0 && m.r1_lower[k] >= 0.0);
                assert!(m.r1_lower[k] <= m.r1[k] * (1.0 + 1e-12) + 1e-300);
            }
        }
    }

    #[test]
    fn implicit_decomposition_closes() {
        let mesh = Mesh::build_1d(10, 1.0).unwrap();
        for strategy in [FaceStrategy::Upwind, FaceStrategy::Centered, "limited".parse().unwrap()] {
            let mut c = SchemeConfig::new(gas(), strategy, strategy);
            c.source_e = crate::schemes::EnergySource::Uniform(0.1);
            c.linear_tol = 1e-14;
            c.picard_tol = 1e-13;
            let u = sine_u(&mesh);
            let s = bump_state(&mesh, u.clone());
            let out = implicit_step(&mesh, &s, &u, 0.02, &c).unwrap();
            let res = entropy_residual_implicit(&mesh, &s, &out, gas()).unwrap();
            let r = remainder_implicit(&mesh, &s, &out, gas()).unwrap();
            let phi_e = PhiE::new(gas());
            let mut total_m = 0.0;
            let mut total_e = 0.0;
            for (k, &res_k) in res.iter().enumerate() {
                let vol = mesh.cell(k).measure;
                let lhs = res_k + vol * (r.r1_m[k] + r.r2_m[k] + r.r1_e[k] + r.r2_e[k]);
                let rhs = phi_e.deriv(out.state.e[k]).unwrap() * vol * out.source[k];
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-9);
                total_m += vol * r.delta_rm[k];
                total_e += vol * r.delta_re[k];
            }
            assert_abs_diff_eq!(total_m, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(total_e, 0.0, epsilon = 1e-12);
            if strategy == FaceStrategy::Upwind {
                assert!(r.r2_m.iter().chain(&r.r2_e).all(|&v| v >= 0.0));
            }
        }
    }

    #[test]
    fn zero_velocity_gives_zero_delta_r() {
        let mesh = Mesh::build_1d(4, 1.0).unwrap();
        let c = SchemeConfig::new(gas(), FaceStrategy::Upwind, FaceStrategy::Upwind);
        let s = bump_state(&mesh, vec![0.0; 5]);
        let out = implicit_step(&mesh, &s, &vec![0.0; 5], 0.1, &c).unwrap();
        let r = remainder_implicit(&mesh, &s, &out, gas()).unwrap();
        assert!(r.delta_rm.iter().chain(&r.delta_re).all(|&v| v == 0.0));
    }

    #[test]
    fn uniform_energy_has_no_r() {
        let mesh = Mesh::build_1d(6, 1.0).unwrap();
        let c = SchemeConfig::new(gas(), FaceStrategy::Upwind, FaceStrategy::Upwind);
        let u = sine_u(&mesh);
        let rho = mesh.cells().iter().map(|x| 1.0 + x.centroid[0]).collect();
        let s = State::new(&mesh, rho, vec![2.0; 6], u.clone(), gas()).unwrap();
        let out = explicit_step(&mesh, &s, 0.01, &c, &VelocityMode::Prescribed(u)).unwrap();
        let e = remainder_explicit_energy(&mesh, &s, &out, gas()).unwrap();
        assert!(e.r.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn global_entropy_basics() {
        let mesh = Mesh::build_1d(3, 1.0).unwrap();
        let s = State::new(&mesh, vec![1.0; 3], vec![1.0; 3], vec![0.0; 4], gas()).unwrap();
        assert_eq!(global_entropy(&mesh, &s, gas()).unwrap(), 0.0);
    }
}
