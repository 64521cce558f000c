//! Time stepping, diagnostics recording and run outputs.

use std::fs;
use std::path::Path;

use eulerfv_core::diagnostics::{check_bounds, BoundConstants, BoundEntry, RunHistory, SchemeKind};
use eulerfv_core::mesh::Mesh;
use eulerfv_core::schemes::{
    explicit_cfl_step, explicit_step, implicit_step, SchemeConfig, StepOutcome, VelocityMode,
};
use serde::Serialize;

use crate::config::{RunConfig, TimeStep};
use crate::error::{io_err, LabError, Result};

/// A step is skipped when less than this fraction of the end time remains.
const END_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub initial_entropy: f64,
    pub final_entropy: f64,
    /// `max_n (S^{n+1} - S^n)` with `S = Σ|K|η`.
    pub max_entropy_increase: f64,
    /// Largest per-cell entropy residual, remainder excluded.
    pub max_local_residual: f64,
    /// Smallest density and internal energy over all levels.
    pub min_rho: f64,
    pub min_e: f64,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// `max_n |Σ|K|ρ^n - Σ|K|ρ^0| / Σ|K|ρ^0`.
    pub mass_drift: f64,
    pub all_bounds_satisfied: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub note: String,
}

impl From<&BoundEntry> for BoundRecord {
    fn from(b: &BoundEntry) -> Self {
        BoundRecord {
            name: b.name.to_string(),
            lhs: b.lhs,
            rhs: b.rhs,
            satisfied: b.satisfied,
            note: b.note.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub seed: u64,
    pub scheme: String,
    pub strategy_rho: String,
    pub strategy_e: String,
    pub cells: usize,
    pub m: f64,
    pub bounds: Vec<BoundRecord>,
    pub summary: RunSummary,
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub mesh: Mesh,
    pub history: RunHistory,
    pub constants: BoundConstants,
    pub bounds: Vec<BoundEntry>,
    pub summary: RunSummary,
}

impl RunArtifacts {
    pub fn report(&self, config: &RunConfig) -> BoundReport {
        BoundReport {
            seed: config.seed,
            scheme: config.scheme.name().to_string(),
            strategy_rho: config.strategy_rho.to_string(),
            strategy_e: config.strategy_e.to_string(),
            cells: self.mesh.n_cells(),
            m: self.constants.m,
            bounds: self.bounds.iter().map(BoundRecord::from).collect(),
            summary: self.summary.clone(),
        }
    }
}

fn mass(mesh: &Mesh, rho: &[f64]) -> f64 {
    mesh.cells().iter().zip(rho).map(|(c, r)| c.measure * r).sum()
}

fn step_once(
    mesh: &Mesh,
    config: &RunConfig,
    scheme: &SchemeConfig,
    history: &RunHistory,
    velocity: &VelocityMode,
    remaining: f64,
) -> eulerfv_core::Result<StepOutcome> {
    let state = history.current();
    match (config.scheme, config.time_step) {
        (SchemeKind::Explicit, TimeStep::Cfl) => {
            Ok(explicit_cfl_step(mesh, state, scheme, velocity, remaining)?.outcome)
        }
        (kind, _) => {
            let dt = config.nominal_dt(mesh).expect("fixed or power rule").min(remaining);
            match kind {
                SchemeKind::Explicit => explicit_step(mesh, state, dt, scheme, velocity),
                SchemeKind::Implicit => {
                    let u = match velocity {
                        VelocityMode::Prescribed(u) => u.clone(),
                        VelocityMode::Evolved1d => unreachable!("rejected by validation"),
                    };
                    implicit_step(mesh, state, &u, dt, scheme)
                }
            }
        }
    }
}

/// Runs to the end time (or the step cap) and evaluates the bounds, without
/// touching the filesystem.
pub fn simulate(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let mesh = config.build_mesh()?;
    let scheme = config.scheme_config()?;
    let initial = config.initial_state(&mesh)?;
    let velocity = config.velocity_mode(&mesh);
    let mut history = RunHistory::new(&mesh, config.scheme, &scheme, initial)?;

    loop {
        let n = history.steps.len();
        if config.max_steps.is_some_and(|m| n >= m) {
            break;
        }
        let remaining = match config.end_time {
            Some(t) => {
                let left = t - history.current().time;
                if left <= END_TOLERANCE * t.max(f64::MIN_POSITIVE) {
                    break;
                }
                left
            }
            None => f64::INFINITY,
        };
        let outcome =
            step_once(&mesh, config, &scheme, &history, &velocity, remaining).map_err(|source| LabError::Step {
                step: n + 1,
                source,
            })?;
        history
            .record(&mesh, &scheme, outcome)
            .map_err(|source| LabError::Step { step: n + 1, source })?;
    }

    let constants = BoundConstants::from_history(&history)?;
    let bounds = check_bounds(&mesh, &history, &constants, config.bound_options())?;
    let summary = summarize(&mesh, &history, &bounds);
    Ok(RunArtifacts {
        mesh,
        history,
        constants,
        bounds,
        summary,
    })
}

fn summarize(mesh: &Mesh, history: &RunHistory, bounds: &[BoundEntry]) -> RunSummary {
    let initial_mass = mass(mesh, &history.levels[0].rho);
    let mut previous = history.initial_entropy;
    let mut max_increase = f64::NEG_INFINITY;
    let mut max_residual = f64::NEG_INFINITY;
    for d in &history.steps {
        max_increase = max_increase.max(d.global_entropy - previous);
        previous = d.global_entropy;
        for &r in &d.local_entropy_residual {
            max_residual = max_residual.max(r);
        }
    }
    let fold_min = |f: fn(&eulerfv_core::schemes::State) -> &Vec<f64>| {
        history
            .levels
            .iter()
            .flat_map(|s| f(s).iter().copied())
            .fold(f64::INFINITY, f64::min)
    };
    let mass_drift = history
        .levels
        .iter()
        .map(|s| (mass(mesh, &s.rho) - initial_mass).abs() / initial_mass)
        .fold(0.0, f64::max);
    RunSummary {
        steps: history.steps.len(),
        final_time: history.final_time(),
        initial_entropy: history.initial_entropy,
        final_entropy: previous,
        max_entropy_increase: if history.steps.is_empty() { 0.0 } else { max_increase },
        max_local_residual: if history.steps.is_empty() { 0.0 } else { max_residual },
        min_rho: fold_min(|s| &s.rho),
        min_e: fold_min(|s| &s.e),
        initial_mass,
        final_mass: mass(mesh, &history.current().rho),
        mass_drift,
        all_bounds_satisfied: bounds.iter().all(|b| b.satisfied),
    }
}

#[derive(Serialize)]
struct Row<'a> {
    step: usize,
    time: f64,
    name: &'a str,
    value: f64,
}

/// One row per (step, quantity): step size, global entropy, mass, extrema,
/// the largest local entropy residual and the `L¹` norm `Σ|K||R_K|` of every
/// remainder field.
pub fn write_steps_csv(path: &Path, artifacts: &RunArtifacts) -> Result<()> {
    let mesh = &artifacts.mesh;
    let history = &artifacts.history;
    let mut w = csv::Writer::from_path(path)?;
    let l1 = |f: &[f64]| -> f64 { mesh.cells().iter().zip(f).map(|(c, v)| c.measure * v.abs()).sum() };
    let level0 = &history.levels[0];
    w.serialize(Row { step: 0, time: level0.time, name: "global_entropy", value: history.initial_entropy })?;
    w.serialize(Row { step: 0, time: level0.time, name: "mass", value: mass(mesh, &level0.rho) })?;
    for (d, state) in history.steps.iter().zip(&history.levels[1..]) {
        let (step, time) = (d.step, d.time);
        let mut put = |name: &str, value: f64| w.serialize(Row { step, time, name, value });
        put("dt", d.dt)?;
        put("global_entropy", d.global_entropy)?;
        put("mass", mass(mesh, &state.rho))?;
        put("min_rho", state.rho.iter().copied().fold(f64::INFINITY, f64::min))?;
        put("min_e", state.e.iter().copied().fold(f64::INFINITY, f64::min))?;
        put(
            "max_local_residual",
            d.local_entropy_residual.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        )?;
        for (name, field) in &d.remainders {
            put(&format!("l1_{name}"), l1(field))?;
        }
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn write_report(path: &Path, report: &BoundReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

/// Runs and writes `steps.csv` and `bounds.json` into `out`.
pub fn run(config: &RunConfig, out: &Path) -> Result<RunArtifacts> {
    let artifacts = simulate(config)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    if config.write_csv {
        write_steps_csv(&out.join("steps.csv"), &artifacts)?;
    }
    if config.write_report {
        write_report(&out.join("bounds.json"), &artifacts.report(config))?;
    }
    Ok(artifacts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_rest_state_is_stationary() {
        for scheme in ["explicit", "implicit"] {
            let c = RunConfig::parse(&format!("cells = 8\nscheme = {scheme}\nmax_steps = 5\n")).unwrap();
            let a = simulate(&c).unwrap();
            assert_eq!(a.summary.steps, 5);
            assert_eq!(a.history.current().rho, a.history.levels[0].rho);
            assert_eq!(a.summary.final_entropy, a.summary.initial_entropy);
            for d in &a.history.steps {
                assert!(d.local_entropy_residual.iter().all(|&v| v == 0.0));
                for field in d.remainders.values() {
                    assert!(field.iter().all(|&v| v == 0.0));
                }
            }
            assert!(a.summary.all_bounds_satisfied);
        }
    }

    #[test]
    fn zero_end_time_takes_no_step() {
        let c = RunConfig::parse("cells = 4\ninitial = gaussian-bump\nend_time = 0\n").unwrap();
        let a = simulate(&c).unwrap();
        assert_eq!(a.summary.steps, 0);
        assert_eq!(a.summary.final_entropy, a.summary.initial_entropy);
        assert!(a.bounds.is_empty());
    }

    #[test]
    fn end_time_is_hit_exactly() {
        let c = RunConfig::parse("cells = 8\nvelocity = sine\ndt = 0.03\nend_time = 0.1\n").unwrap();
        let a = simulate(&c).unwrap();
        assert_eq!(a.summary.steps, 4);
        assert!((a.summary.final_time - 0.1).abs() < 1e-15);
    }

    #[test]
    fn explicit_cfl_run_stays_positive() {
        let c = RunConfig::parse(
            "cells = 32\ninitial = gaussian-bump\nvelocity = sine\nscheme = explicit\ndt_rule = cfl\nmax_steps = 40\n",
        )
        .unwrap();
        let a = simulate(&c).unwrap();
        assert!(a.summary.min_rho > 0.0 && a.summary.min_e > 0.0);
        assert!(a.summary.mass_drift < 1e-12);
        assert!(a.summary.all_bounds_satisfied, "{:?}", a.bounds);
    }
}
