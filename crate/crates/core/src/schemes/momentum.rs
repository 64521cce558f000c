//! 1D staggered momentum balance with `q`-Laplacian stabilization.
//!
//! Velocities live on the interior faces; the dual cell of face `σ = K|L`
//! spans the two half cells around it.

use alloc::vec;

use crate::math::{abs, powf};
use crate::mesh::Mesh;
use crate::{CellField, Error, FaceField, Result};

use super::{MassUpdate, SchemeConfig, State};

fn require_1d(mesh: &Mesh) -> Result<()> {
    if mesh.dim() == 1 {
        Ok(())
    } else {
        Err(Error::InvalidConfig("the momentum driver is one-dimensional"))
    }
}

/// `τ_K = |δ_K u|^{q-2} δ_K u / h_K^{q-1}` with `δ_K u` the right minus the
/// left face velocity of `K`.
pub fn stabilization_fluxes_1d(mesh: &Mesh, u: &[f64], q: f64) -> Result<CellField> {
    require_1d(mesh)?;
    mesh.check_face_field("velocity", u)?;
    Ok(mesh
        .cells()
        .iter()
        .map(|cell| {
            let du = u[cell.faces[1]] - u[cell.faces[0]];
            powf(abs(du), q - 2.0) * du / powf(cell.diameter, q - 1.0)
        })
        .collect())
}

/// `|D_σ| (-Δ_q u)_σ = τ_K - τ_L` on interior faces (`K` left of `σ`), zero on
/// the boundary.
pub fn q_laplacian_1d(mesh: &Mesh, u: &[f64], q: f64) -> Result<FaceField> {
    let tau = stabilization_fluxes_1d(mesh, u, q)?;
    let mut out = vec![0.0; mesh.n_faces()];
    for (s, k, l) in mesh.interior_faces() {
        out[s] = tau[k] - tau[l];
    }
    Ok(out)
}

/// `Σ_K h_K |δ_K u / h_K|^q`, which equals `Σ_σ |D_σ| (-Δ_q u)_σ u_σ` when
/// the boundary velocities vanish.
pub fn stabilization_energy_1d(mesh: &Mesh, u: &[f64], q: f64) -> Result<f64> {
    require_1d(mesh)?;
    mesh.check_face_field("velocity", u)?;
    Ok(mesh
        .cells()
        .iter()
        .map(|cell| {
            let h = cell.diameter;
            h * powf(abs(u[cell.faces[1]] - u[cell.faces[0]]) / h, q)
        })
        .sum())
}

/// Explicit update of the face velocities:
///
/// `|D|(ρ_D^{n+1} u^{n+1} - ρ_D^n u^n)/δt + G_L u_L - G_K u_K + p_L - p_K
/// + h_M^α (τ_K - τ_L) = 0`,
///
/// where `G_K` is the mean of the two mass fluxes of `K` and `u_K` the upwind
/// face velocity at the centre of `K`.
pub fn momentum_step_1d(
    mesh: &Mesh,
    state: &State,
    mass: &MassUpdate,
    dt: f64,
    config: &SchemeConfig,
) -> Result<FaceField> {
    require_1d(mesh)?;
    let n = mesh.n_cells();
    let stab = config.stabilization;
    let convective = |c: usize| {
        let cell = mesh.cell(c);
        let (left, right) = (cell.faces[0], cell.faces[1]);
        let g = 0.5 * (mass.fluxes[left] + mass.fluxes[right]);
        let up = if g >= 0.0 { state.u[left] } else { state.u[right] };
        g * up
    };
    let tau = if stab.enabled {
        stab.check()?;
        stabilization_fluxes_1d(mesh, &state.u, stab.q)?
    } else {
        vec![0.0; n]
    };
    let h_alpha = powf(mesh.h_max(), stab.alpha);

    let mut u = vec![0.0; mesh.n_faces()];
    for (s, k, l) in mesh.interior_faces() {
        let (mk, ml) = (mesh.cell(k).measure, mesh.cell(l).measure);
        let dual = 0.5 * (mk + ml);
        let rho_old = 0.5 * (mk * state.rho[k] + ml * state.rho[l]) / dual;
        let rho_new = 0.5 * (mk * mass.rho[k] + ml * mass.rho[l]) / dual;
        if !(rho_new > 0.0) {
            return Err(Error::Positivity {
                field: "dual density",
                cell: s,
                value: rho_new,
            });
        }
        let balance = convective(l) - convective(k)
            + (state.p[l] - state.p[k])
            + h_alpha * (tau[k] - tau[l]);
        u[s] = (dual * rho_old * state.u[s] - dt * balance) / (dual * rho_new);
    }
    Ok(u)
}
