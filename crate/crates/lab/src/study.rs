//! Refinement studies over a ladder of resolutions.

use std::fs;
use std::path::Path;
use std::thread;

use eulerfv_core::diagnostics::{norm_bv_space, norm_bv_time, norm_l1, norm_weak_m11, SchemeKind};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{io_err, LabError, Result};
use crate::run::{simulate, write_report, BoundReport, RunArtifacts};

/// Norms below this are treated as exact zeros.
const ZERO: f64 = 1e-300;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LevelRow {
    pub cells: usize,
    pub h: f64,
    pub dt_max: f64,
    pub steps: usize,
    pub m: f64,
    pub bv_rho: f64,
    pub bv_e: f64,
    pub tbv_rho: f64,
    pub tbv_e: f64,
    /// Weak surrogate norm of `R_η,1` (explicit) or `δR_m + δR_e` (implicit).
    pub weak_remainder: f64,
    /// `L¹` norm of `R_η,2` (explicit); zero for implicit runs.
    pub l1_remainder: f64,
    pub bounds_satisfied: bool,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Order {
    Fitted(f64),
    ExactZero,
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Order::Fitted(v) => write!(f, "{v:.3}"),
            Order::ExactZero => f.write_str("exact-zero"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StudyTable {
    pub seed: u64,
    pub levels: Vec<LevelRow>,
    pub weak_order: Order,
    pub l1_order: Order,
    /// `max/min` across the ladder of `M` and of the four BV norms.
    pub m_spread: f64,
    pub bv_spread: f64,
    pub bounds_satisfied: bool,
}

/// Least-squares slope of `log y` against `log h`. Exact zeros at every level
/// give `ExactZero`; a zero at some levels only gives `Fitted(+∞)`.
pub fn fit_order(h: &[f64], y: &[f64]) -> Order {
    if y.iter().all(|&v| v.abs() <= ZERO) {
        return Order::ExactZero;
    }
    if y.iter().any(|&v| v.abs() <= ZERO) {
        return Order::Fitted(f64::INFINITY);
    }
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Order::Fitted(sxy / sxx)
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi <= ZERO {
        1.0
    } else {
        hi / lo
    }
}

fn level_row(config: &RunConfig, a: &RunArtifacts) -> Result<LevelRow> {
    let mesh = &a.mesh;
    let h = &a.history;
    let dts = h.dts();
    let times = h.times();
    let rho: Vec<Vec<f64>> = h.levels.iter().map(|s| s.rho.clone()).collect();
    let e: Vec<Vec<f64>> = h.levels.iter().map(|s| s.e.clone()).collect();
    let n = h.steps.len();
    let (space_rho, space_e) = match h.kind {
        SchemeKind::Implicit => (&rho[1..], &e[1..]),
        SchemeKind::Explicit => (&rho[..n], &e[..n]),
    };
    let weak_series = match h.kind {
        SchemeKind::Explicit => h.remainder_series("R_eta_1"),
        SchemeKind::Implicit => h
            .remainder_series("delta_Rm")
            .iter()
            .zip(h.remainder_series("delta_Re"))
            .map(|(a, b)| a.iter().zip(&b).map(|(x, y)| x + y).collect())
            .collect(),
    };
    let weak = if n == 0 {
        0.0
    } else {
        norm_weak_m11(mesh, &weak_series, &dts, &times, h.final_time(), config.modes)?
    };
    let l1 = match h.kind {
        SchemeKind::Explicit => norm_l1(mesh, &h.remainder_series("R_eta_2"), &dts)?,
        SchemeKind::Implicit => 0.0,
    };
    Ok(LevelRow {
        cells: config.cells,
        h: mesh.h_max(),
        dt_max: dts.iter().copied().fold(0.0, f64::max),
        steps: n,
        m: a.constants.m,
        bv_rho: norm_bv_space(mesh, space_rho, &dts)?,
        bv_e: norm_bv_space(mesh, space_e, &dts)?,
        tbv_rho: norm_bv_time(mesh, &rho)?,
        tbv_e: norm_bv_time(mesh, &e)?,
        weak_remainder: weak,
        l1_remainder: l1,
        bounds_satisfied: a.summary.all_bounds_satisfied,
    })
}

/// Runs every ladder level, concurrently, and fits observed orders.
pub fn refinement_study(config: &RunConfig) -> Result<(StudyTable, Vec<(RunConfig, RunArtifacts)>)> {
    config.validate()?;
    if config.ladder.len() < 3 {
        return Err(LabError::Invalid("a study needs at least three ladder levels".into()));
    }
    let configs: Vec<RunConfig> = config.ladder.iter().map(|&n| config.with_cells(n)).collect();
    let results: Vec<Result<RunArtifacts>> = thread::scope(|scope| {
        let handles: Vec<_> = configs.iter().map(|c| scope.spawn(move || simulate(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study level panicked"))
            .collect()
    });
    let mut levels = Vec::new();
    let mut rows = Vec::new();
    for (c, r) in configs.into_iter().zip(results) {
        let a = r?;
        rows.push(level_row(&c, &a)?);
        levels.push((c, a));
    }
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let weak: Vec<f64> = rows.iter().map(|r| r.weak_remainder).collect();
    let l1: Vec<f64> = rows.iter().map(|r| r.l1_remainder).collect();
    let bv_spread = [
        spread(rows.iter().map(|r| r.bv_rho)),
        spread(rows.iter().map(|r| r.bv_e)),
        spread(rows.iter().map(|r| r.tbv_rho)),
        spread(rows.iter().map(|r| r.tbv_e)),
    ]
    .into_iter()
    .fold(1.0, f64::max);
    let table = StudyTable {
        seed: config.seed,
        weak_order: fit_order(&hs, &weak),
        l1_order: fit_order(&hs, &l1),
        m_spread: spread(rows.iter().map(|r| r.m)),
        bv_spread,
        bounds_satisfied: rows.iter().all(|r| r.bounds_satisfied),
        levels: rows,
    };
    Ok((table, levels))
}

pub fn write_table_csv(path: &Path, table: &StudyTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in &table.levels {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Runs the study and writes `study.csv`, `study.json` and one
/// `level_<cells>/bounds.json` per level into `out`.
pub fn study(config: &RunConfig, out: &Path) -> Result<StudyTable> {
    let (table, levels) = refinement_study(config)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    write_table_csv(&out.join("study.csv"), &table)?;
    let path = out.join("study.json");
    fs::write(&path, serde_json::to_string_pretty(&table)? + "\n").map_err(io_err(&path))?;
    if config.write_report {
        for (c, a) in &levels {
            let dir = out.join(format!("level_{}", c.cells));
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
            let report: BoundReport = a.report(c);
            write_report(&dir.join("bounds.json"), &report)?;
        }
    }
    Ok(table)
}
