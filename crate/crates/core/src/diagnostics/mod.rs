//! Entropy residuals, remainder terms, discrete norms and the
//! bounds, evaluated on recorded runs.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::entropy::GasParameters;
use crate::face_values::FaceStrategy;
use crate::mesh::Mesh;
use crate::schemes::{SchemeConfig, State, StepOutcome};
use crate::{CellField, FaceField, Result};

mod bounds;
mod norms;
mod remainders;

pub use bounds::{check_bounds, BoundConstants, BoundEntry, BoundOptions};
pub use norms::{norm_bv_space, norm_bv_time, norm_l1, norm_weak_m11};
pub use remainders::{
    cons_noncons, entropy_residual_explicit, entropy_residual_implicit, global_entropy,
    remainder_explicit_energy, remainder_explicit_mass, remainder_implicit, EnergyRemainders,
    ImplicitRemainders, MassRemainders,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Implicit,
    Explicit,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Implicit => "implicit",
            SchemeKind::Explicit => "explicit",
        }
    }
}

/// Everything measured on one step `n → n+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDiagnostics {
    /// Index of the new level.
    pub step: usize,
    /// `t_{n+1}`.
    pub time: f64,
    pub dt: f64,
    /// `(|K|/δt)(η^{n+1} - η^n) + Σ|σ| η_σ u_{K,σ}`, remainder excluded.
    pub local_entropy_residual: CellField,
    /// `Σ|K| η` at the new level.
    pub global_entropy: f64,
    /// Remainder fields by name, per unit measure.
    pub remainders: BTreeMap<&'static str, CellField>,
    /// The velocity the fluxes of this step were built with.
    pub velocity: FaceField,
}

impl StepDiagnostics {
    pub fn remainder(&self, name: &str) -> Option<&CellField> {
        self.remainders.get(name)
    }
}

fn add(a: &[f64], b: &[f64]) -> CellField {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Evaluates residual and remainders of one step.
///
/// Implicit keys: `delta_Rm`, `delta_Re`, `R1_m`, `R2_m`, `R1_e`, `R2_e`.
///
/// Explicit keys: `R_m`, `R1_m`, `R1_m_mid`, `R1_m_lower`, `R2_m`, `R01`,
/// `R02`, `delta_R2_m` for the mass balance, `R_e`, `R1_e`, `R1_e_mid`,
/// `R1_e_lower`, `R2_e`, `delta_R2_e`, `R_pw` for the energy balance, and the
/// combinations `R_eta_1 = δR₂_m + δR₂_e`, `R_eta_2 = R_m + R_e + R_pw`,
/// `sign_m = R1_m_lower + R2_m + R02`, `sign_e = R1_e_lower + R2_e + R_e`.
/// When both strategies satisfy the hypotheses, `R_eta_case1 = R_eta_1 +
/// R_eta_2`; when both are upwind, `R_eta_case2 = R01 + R_pw`.
pub fn diagnose_step(
    mesh: &Mesh,
    kind: SchemeKind,
    config: &SchemeConfig,
    state_n: &State,
    outcome: &StepOutcome,
) -> Result<StepDiagnostics> {
    let gas = config.gas;
    let mut rem = BTreeMap::new();
    let residual = match kind {
        SchemeKind::Implicit => {
            let r = remainder_implicit(mesh, state_n, outcome, gas)?;
            rem.insert("delta_Rm", r.delta_rm);
            rem.insert("delta_Re", r.delta_re);
            rem.insert("R1_m", r.r1_m);
            rem.insert("R2_m", r.r2_m);
            rem.insert("R1_e", r.r1_e);
            rem.insert("R2_e", r.r2_e);
            entropy_residual_implicit(mesh, state_n, outcome, gas)?
        }
        SchemeKind::Explicit => {
            let m = remainder_explicit_mass(mesh, state_n, outcome)?;
            let e = remainder_explicit_energy(mesh, state_n, outcome, gas)?;
            let sign_m = add(&add(&m.r1_lower, &m.r2), &m.r02);
            let sign_e = add(&add(&e.r1_lower, &e.r2), &e.r);
            let eta_1 = add(&m.delta_r2, &e.delta_r2);
            let eta_2 = add(&add(&m.r, &e.r), &e.r_pw);
            if config.strategy_rho.satisfies_hypothesis() && config.strategy_e.satisfies_hypothesis() {
                rem.insert("R_eta_case1", add(&eta_1, &eta_2));
            }
            if config.strategy_rho == FaceStrategy::Upwind && config.strategy_e == FaceStrategy::Upwind {
                rem.insert("R_eta_case2", add(&m.r01, &e.r_pw));
            }
            rem.insert("R_eta_1", eta_1);
            rem.insert("R_eta_2", eta_2);
            rem.insert("sign_m", sign_m);
            rem.insert("sign_e", sign_e);
            rem.insert("R_m", m.r);
            rem.insert("R1_m", m.r1);
            rem.insert("R1_m_mid", m.r1_mid);
            rem.insert("R1_m_lower", m.r1_lower);
            rem.insert("R2_m", m.r2);
            rem.insert("R01", m.r01);
            rem.insert("R02", m.r02);
            rem.insert("delta_R2_m", m.delta_r2);
            rem.insert("R_e", e.r);
            rem.insert("R1_e", e.r1);
            rem.insert("R1_e_mid", e.r1_mid);
            rem.insert("R1_e_lower", e.r1_lower);
            rem.insert("R2_e", e.r2);
            rem.insert("delta_R2_e", e.delta_r2);
            rem.insert("R_pw", e.r_pw);
            entropy_residual_explicit(mesh, state_n, outcome, gas)?
        }
    };
    Ok(StepDiagnostics {
        step: outcome.state.step,
        time: outcome.state.time,
        dt: outcome.dt,
        local_entropy_residual: residual,
        global_entropy: global_entropy(mesh, &outcome.state, gas)?,
        remainders: rem,
        velocity: outcome.u_flux.clone(),
    })
}

/// All levels of a run and the diagnostics of each step.
#[derive(Clone, Debug)]
pub struct RunHistory {
    pub kind: SchemeKind,
    pub strategy_rho: FaceStrategy,
    pub strategy_e: FaceStrategy,
    pub gas: GasParameters,
    pub initial_entropy: f64,
    /// `levels[n]` is the state at `t_n`.
    pub levels: Vec<State>,
    pub steps: Vec<StepDiagnostics>,
}

impl RunHistory {
    pub fn new(mesh: &Mesh, kind: SchemeKind, config: &SchemeConfig, initial: State) -> Result<Self> {
        let initial_entropy = global_entropy(mesh, &initial, config.gas)?;
        Ok(RunHistory {
            kind,
            strategy_rho: config.strategy_rho,
            strategy_e: config.strategy_e,
            gas: config.gas,
            initial_entropy,
            levels: alloc::vec![initial],
            steps: Vec::new(),
        })
    }

    pub fn current(&self) -> &State {
        self.levels.last().expect("a history always holds its initial level")
    }

    /// Diagnoses a step taken from the current level and appends it.
    pub fn record(&mut self, mesh: &Mesh, config: &SchemeConfig, outcome: StepOutcome) -> Result<&StepDiagnostics> {
        let d = diagnose_step(mesh, self.kind, config, self.current(), &outcome)?;
        self.steps.push(d);
        self.levels.push(outcome.state);
        Ok(self.steps.last().expect("just pushed"))
    }

    pub fn dts(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.dt).collect()
    }

    pub fn times(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.time).collect()
    }

    pub fn final_time(&self) -> f64 {
        self.current().time
    }

    /// One remainder field per step; empty if the key is missing.
    pub fn remainder_series(&self, name: &str) -> Vec<CellField> {
        self.steps
            .iter()
            .filter_map(|s| s.remainders.get(name).cloned())
            .collect()
    }
}
