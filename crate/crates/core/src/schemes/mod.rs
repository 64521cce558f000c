//! Time steppers for the mass and internal-energy balances.
//!
//! Both schemes use the same unknowns: cell densities and specific internal
//! energies, and one normal velocity per face. The explicit scheme evaluates
//! convection fluxes at the old time level; the implicit one at the new level
//! with a prescribed velocity.

mod cfl;
mod explicit;
mod implicit;
mod momentum;
mod velocity;

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::entropy::{eos_pressure, GasParameters};
use crate::face_values::{FaceStrategy, FaceValueRecord};
use crate::mesh::Mesh;
use crate::{CellField, Error, FaceField, Result};

pub use cfl::{acoustic_dt, cfl_dt_energy, cfl_dt_mass, explicit_cfl_step, CflStep};
pub use explicit::{explicit_energy_step, explicit_mass_step, explicit_step, MassUpdate};
pub use implicit::implicit_step;
pub use momentum::{
    momentum_step_1d, q_laplacian_1d, stabilization_energy_1d, stabilization_fluxes_1d,
};
pub use velocity::{velocity_norm_w1q, VelocityField};

/// Discrete unknowns at one time level.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub rho: CellField,
    pub e: CellField,
    /// Pressure from the equation of state.
    pub p: CellField,
    /// Normal velocity along each face's reference normal; zero on the boundary.
    pub u: FaceField,
    pub step: usize,
    pub time: f64,
}

impl State {
    pub fn new(
        mesh: &Mesh,
        rho: CellField,
        e: CellField,
        u: FaceField,
        gas: GasParameters,
    ) -> Result<Self> {
        mesh.check_cell_field("density", &rho)?;
        mesh.check_cell_field("internal energy", &e)?;
        mesh.check_face_field("velocity", &u)?;
        check_positive("density", &rho)?;
        check_positive("internal energy", &e)?;
        if mesh
            .faces()
            .iter()
            .zip(&u)
            .any(|(f, &v)| f.is_boundary() && v != 0.0)
        {
            return Err(Error::InvalidConfig("boundary velocity must vanish"));
        }
        let p = pressures(&rho, &e, gas)?;
        Ok(State {
            rho,
            e,
            p,
            u,
            step: 0,
            time: 0.0,
        })
    }

    /// `u_{K,σ}`, the velocity through `face` in the direction outward of `cell`.
    pub fn normal_velocity(&self, mesh: &Mesh, cell: usize, face: usize) -> f64 {
        mesh.orientation(cell, face) * self.u[face]
    }
}

pub(crate) fn pressures(rho: &[f64], e: &[f64], gas: GasParameters) -> Result<CellField> {
    rho.iter()
        .zip(e)
        .map(|(&r, &x)| eos_pressure(r, x, gas))
        .collect()
}

pub(crate) fn check_positive(field: &'static str, values: &[f64]) -> Result<()> {
    match values.iter().position(|&v| !(v > 0.0)) {
        Some(cell) => Err(Error::Positivity {
            field,
            cell,
            value: values[cell],
        }),
        None => Ok(()),
    }
}

/// `Σ_σ |σ| u_{K,σ}` for every cell.
pub fn discrete_divergence(mesh: &Mesh, u: &[f64]) -> CellField {
    mesh.cells()
        .iter()
        .enumerate()
        .map(|(k, cell)| {
            cell.faces
                .iter()
                .map(|&s| mesh.face(s).measure * mesh.orientation(k, s) * u[s])
                .sum()
        })
        .collect()
}

/// Nonnegative source on the right-hand side of the internal-energy balance.
pub trait SourceHook: Send + Sync {
    fn value(&self, mesh: &Mesh, cell: usize, time: f64) -> f64;
}

#[derive(Clone, Default)]
pub enum EnergySource {
    #[default]
    Zero,
    Uniform(f64),
    PerCell(CellField),
    Hook(Arc<dyn SourceHook>),
}

impl fmt::Debug for EnergySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergySource::Zero => f.write_str("Zero"),
            EnergySource::Uniform(s) => write!(f, "Uniform({s})"),
            EnergySource::PerCell(v) => write!(f, "PerCell({} cells)", v.len()),
            EnergySource::Hook(_) => f.write_str("Hook"),
        }
    }
}

impl EnergySource {
    /// `S_K` at `time` for every cell; negative values are rejected.
    pub fn values(&self, mesh: &Mesh, time: f64) -> Result<CellField> {
        let n = mesh.n_cells();
        let values = match self {
            EnergySource::Zero => vec![0.0; n],
            EnergySource::Uniform(s) => vec![*s; n],
            EnergySource::PerCell(v) => {
                mesh.check_cell_field("energy source", v)?;
                v.clone()
            }
            EnergySource::Hook(h) => (0..n).map(|k| h.value(mesh, k, time)).collect(),
        };
        match values.iter().position(|&s| !(s >= 0.0)) {
            Some(cell) => Err(Error::NegativeSource {
                cell,
                value: values[cell],
            }),
            None => Ok(values),
        }
    }
}

/// `h_M^α Δ_q` stabilization of the momentum balance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stabilization {
    pub alpha: f64,
    pub q: f64,
    pub enabled: bool,
}

impl Default for Stabilization {
    fn default() -> Self {
        Stabilization {
            alpha: 1.5,
            q: 3.0,
            enabled: true,
        }
    }
}

impl Stabilization {
    /// Requires `q ≥ 2`, `α ≥ 0` and `α < q - 1`.
    pub fn check(&self) -> Result<()> {
        if !(self.q >= 2.0) {
            return Err(Error::InvalidConfig("stabilization exponent q must be >= 2"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidConfig("stabilization exponent alpha must be >= 0"));
        }
        if !(self.alpha < self.q - 1.0) {
            return Err(Error::InvalidConfig("stabilization requires alpha < q - 1"));
        }
        Ok(())
    }
}

/// How the face velocity of the next level is obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum VelocityMode {
    Prescribed(FaceField),
    /// 1D staggered momentum balance.
    Evolved1d,
}

#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub gas: GasParameters,
    pub strategy_rho: FaceStrategy,
    pub strategy_e: FaceStrategy,
    pub source_e: EnergySource,
    pub stabilization: Stabilization,
    /// Multiplies every time-step limit, in `(0, 1]`.
    pub cfl_safety: f64,
    /// Relative widening of the stencil extrema used by the CFL limits.
    pub cfl_margin: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub linear_tol: f64,
    pub linear_max_sweeps: usize,
}

impl SchemeConfig {
    pub fn new(gas: GasParameters, strategy_rho: FaceStrategy, strategy_e: FaceStrategy) -> Self {
        SchemeConfig {
            gas,
            strategy_rho,
            strategy_e,
            source_e: EnergySource::Zero,
            stabilization: Stabilization::default(),
            cfl_safety: 0.5,
            cfl_margin: 0.1,
            picard_tol: 1e-9,
            picard_max_iter: 100,
            linear_tol: 1e-10,
            linear_max_sweeps: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidConfig("cfl_safety must lie in (0, 1]"));
        }
        if !(self.cfl_margin >= 0.0) {
            return Err(Error::InvalidConfig("cfl_margin must be >= 0"));
        }
        if !(self.picard_tol > 0.0 && self.linear_tol > 0.0) {
            return Err(Error::InvalidConfig("solver tolerances must be positive"));
        }
        if self.stabilization.enabled {
            self.stabilization.check()?;
        }
        Ok(())
    }
}

/// Iteration counts of the implicit solver.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolverStats {
    pub picard_iterations: usize,
    pub linear_sweeps: usize,
}

/// Result of one time step, with the face values the step used.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub state: State,
    /// Face densities at the level the fluxes were evaluated at.
    pub rho_faces: Vec<FaceValueRecord>,
    /// Face internal energies at the same level.
    pub e_faces: Vec<FaceValueRecord>,
    /// Mass fluxes `|σ| ρ_σ u_σ` along each face's reference normal.
    pub fluxes: FaceField,
    /// Velocity the fluxes were built with.
    pub u_flux: FaceField,
    /// Energy source used by the step.
    pub source: CellField,
    pub dt: f64,
    pub solver: SolverStats,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stabilization_condition() {
        assert!(Stabilization::default().check().is_ok());
        let weak = Stabilization {
            alpha: 1.0,
            q: 2.0,
            enabled: true,
        };
        assert!(weak.check().is_err());
        let q_small = Stabilization {
            alpha: 0.0,
            q: 1.5,
            enabled: true,
        };
        assert!(q_small.check().is_err());
    }

    #[test]
    fn negative_source_is_rejected() {
        let mesh = Mesh::build_1d(3, 1.0).unwrap();
        assert!(EnergySource::Uniform(0.5).values(&mesh, 0.0).is_ok());
        assert!(matches!(
            EnergySource::PerCell(vec![0.0, -1.0, 0.0]).values(&mesh, 0.0),
            Err(Error::NegativeSource { cell: 1, .. })
        ));
    }

    #[test]
    fn state_rejects_bad_input() {
        let mesh = Mesh::build_1d(2, 1.0).unwrap();
        let gas = GasParameters::new(1.4).unwrap();
        assert!(State::new(&mesh, vec![1.0, 0.0], vec![1.0; 2], vec![0.0; 3], gas).is_err());
        assert!(State::new(&mesh, vec![1.0; 2], vec![1.0; 2], vec![1.0, 0.0, 0.0], gas).is_err());
        let s = State::new(&mesh, vec![2.0; 2], vec![3.0; 2], vec![0.0, 1.0, 0.0], gas).unwrap();
        assert!((s.p[0] - 2.4).abs() < 1e-14);
        assert_eq!(s.normal_velocity(&mesh, 1, 1), -1.0);
    }
}
