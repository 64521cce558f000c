use alloc::vec::Vec;

use crate::entropy::{PhiE, PhiRho};
use crate::face_values::{assemble, mass_fluxes, FaceValueRecord};
use crate::mesh::Mesh;
use crate::{CellField, Error, FaceField, Result};

use super::{
    check_positive, discrete_divergence, momentum_step_1d, pressures, SchemeConfig, SolverStats,
    State, StepOutcome, VelocityMode,
};

/// New densities with the face values and fluxes that produced them.
#[derive(Clone, Debug)]
pub struct MassUpdate {
    pub rho: CellField,
    pub faces: Vec<FaceValueRecord>,
    pub fluxes: FaceField,
}

/// `ρ_K^{n+1} = ρ_K^n - (δt/|K|) Σ_σ F_{K,σ}^n`.
pub fn explicit_mass_step(
    mesh: &Mesh,
    state: &State,
    dt: f64,
    config: &SchemeConfig,
) -> Result<MassUpdate> {
    check_dt(dt)?;
    let faces = assemble(mesh, config.strategy_rho, &PhiRho, &state.rho, &state.u)?;
    let fluxes = mass_fluxes(mesh, &faces, &state.u);
    let rho: CellField = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(k, cell)| {
            let out: f64 = cell
                .faces
                .iter()
                .map(|&s| mesh.orientation(k, s) * fluxes[s])
                .sum();
            state.rho[k] - dt / cell.measure * out
        })
        .collect();
    check_positive("density", &rho)?;
    Ok(MassUpdate { rho, faces, fluxes })
}

/// `ρ^{n+1} e^{n+1} = ρ^n e^n - (δt/|K|)(Σ_σ F_{K,σ}^n e_σ^n + p_K^n Σ_σ |σ| u_{K,σ}^n - |K| S_K^n)`.
pub fn explicit_energy_step(
    mesh: &Mesh,
    state: &State,
    mass: &MassUpdate,
    dt: f64,
    config: &SchemeConfig,
) -> Result<(CellField, Vec<FaceValueRecord>)> {
    check_dt(dt)?;
    let phi_e = PhiE::new(config.gas);
    let faces = assemble(mesh, config.strategy_e, &phi_e, &state.e, &state.u)?;
    let source = config.source_e.values(mesh, state.time)?;
    let div = discrete_divergence(mesh, &state.u);
    let e: CellField = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(k, cell)| {
            let convected: f64 = cell
                .faces
                .iter()
                .map(|&s| mesh.orientation(k, s) * mass.fluxes[s] * faces[s].value)
                .sum();
            let work = state.p[k] * div[k];
            let rhs = state.rho[k] * state.e[k]
                - dt / cell.measure * (convected + work - cell.measure * source[k]);
            rhs / mass.rho[k]
        })
        .collect();
    check_positive("internal energy", &e)?;
    Ok((e, faces))
}

/// Mass, internal energy, then velocity, then pressure.
pub fn explicit_step(
    mesh: &Mesh,
    state: &State,
    dt: f64,
    config: &SchemeConfig,
    velocity: &VelocityMode,
) -> Result<StepOutcome> {
    let mass = explicit_mass_step(mesh, state, dt, config)?;
    let (e, e_faces) = explicit_energy_step(mesh, state, &mass, dt, config)?;
    let source = config.source_e.values(mesh, state.time)?;
    let u = match velocity {
        VelocityMode::Prescribed(u) => {
            mesh.check_face_field("prescribed velocity", u)?;
            u.clone()
        }
        VelocityMode::Evolved1d => momentum_step_1d(mesh, state, &mass, dt, config)?,
    };
    let p = pressures(&mass.rho, &e, config.gas)?;
    Ok(StepOutcome {
        state: State {
            rho: mass.rho,
            e,
            p,
            u,
            step: state.step + 1,
            time: state.time + dt,
        },
        rho_faces: mass.faces,
        e_faces,
        fluxes: mass.fluxes,
        u_flux: state.u.clone(),
        source,
        dt,
        solver: SolverStats::default(),
    })
}

pub(crate) fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig("time step must be positive and finite"))
    }
}
