//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Unknown or repeated keys are
//! errors.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use eulerfv_core::diagnostics::{BoundOptions, SchemeKind};
use eulerfv_core::entropy::GasParameters;
use eulerfv_core::face_values::FaceStrategy;
use eulerfv_core::mesh::Mesh;
use eulerfv_core::schemes::{EnergySource, SchemeConfig, Stabilization, State, VelocityField, VelocityMode};

use crate::error::{io_err, LabError, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    Uniform { rho: f64, e: f64 },
    /// `ρ₀ = 1 + a_ρ exp(-|x - c|²/w²)`, `e₀ = 1 + a_e exp(-|x - c|²/w²)`.
    GaussianBump {
        rho_amplitude: f64,
        e_amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    /// Explicit entropy CFL limits.
    Cfl,
    /// `δt = coef · h^beta`.
    Power { coef: f64, beta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VelocityKind {
    Prescribed,
    /// Explicit 1D momentum balance.
    Evolved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub cells: usize,
    pub cells_y: usize,
    pub length: f64,
    pub length_y: f64,
    pub initial: InitialData,
    pub velocity: VelocityField,
    pub velocity_kind: VelocityKind,
    pub scheme: SchemeKind,
    pub strategy_rho: FaceStrategy,
    pub strategy_e: FaceStrategy,
    pub gamma: f64,
    pub end_time: Option<f64>,
    pub max_steps: Option<usize>,
    pub time_step: TimeStep,
    pub cfl_safety: f64,
    pub cfl_margin: f64,
    pub stabilization: Stabilization,
    pub source_e: f64,
    pub linear_tol: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    pub modes: usize,
    pub holder_p: f64,
    pub ladder: Vec<usize>,
    pub write_csv: bool,
    pub write_report: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let bounds = BoundOptions::default();
        RunConfig {
            dim: 1,
            cells: 64,
            cells_y: 64,
            length: 1.0,
            length_y: 1.0,
            initial: InitialData::Uniform { rho: 1.0, e: 1.0 },
            velocity: VelocityField::Zero,
            velocity_kind: VelocityKind::Prescribed,
            scheme: SchemeKind::Implicit,
            strategy_rho: FaceStrategy::Upwind,
            strategy_e: FaceStrategy::Upwind,
            gamma: 1.4,
            end_time: None,
            max_steps: None,
            time_step: TimeStep::Power { coef: 0.5, beta: 1.0 },
            cfl_safety: 0.5,
            cfl_margin: 0.1,
            stabilization: Stabilization::default(),
            source_e: 0.0,
            linear_tol: 1e-10,
            picard_tol: 1e-9,
            picard_max_iter: 100,
            modes: bounds.modes,
            holder_p: bounds.holder_p,
            ladder: Vec::new(),
            write_csv: true,
            write_report: true,
            seed: 0,
        }
    }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T>
where
    T::Err: Display,
{
    raw.parse().map_err(|e: T::Err| LabError::Config {
        line,
        msg: format!("{key}: {e}"),
    })
}

fn flag(line: usize, key: &str, raw: &str) -> Result<bool> {
    match raw {
        "true" | "on" | "yes" => Ok(true),
        "false" | "off" | "no" => Ok(false),
        _ => Err(LabError::Config {
            line,
            msg: format!("{key}: expected on/off, found {raw:?}"),
        }),
    }
}

fn list<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    raw.split(',').map(|s| value(line, key, s.trim())).collect()
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((k, v)) = content.split_once('=') else {
                return Err(LabError::Config {
                    line,
                    msg: format!("expected key = value, found {content:?}"),
                });
            };
            let k = k.trim().to_string();
            if entries.contains_key(&k) {
                return Err(LabError::Config {
                    line,
                    msg: format!("repeated key {k}"),
                });
            }
            entries.insert(k, (line, v.trim().to_string()));
        }

        let mut c = RunConfig::default();
        let get = |key: &str| entries.get(key).map(|(l, v)| (*l, v.as_str()));
        for (key, (line, raw)) in &entries {
            let (line, raw) = (*line, raw.as_str());
            match key.as_str() {
                "dim" => c.dim = value(line, key, raw)?,
                "cells" => c.cells = value(line, key, raw)?,
                "cells_y" => c.cells_y = value(line, key, raw)?,
                "length" => c.length = value(line, key, raw)?,
                "length_y" => c.length_y = value(line, key, raw)?,
                "initial" | "rho0" | "e0" | "rho_amplitude" | "e_amplitude" | "bump_center"
                | "bump_width" => {}
                "velocity" | "velocity_amplitude" => {}
                "velocity_mode" => {
                    c.velocity_kind = match raw {
                        "prescribed" => VelocityKind::Prescribed,
                        "evolved" => VelocityKind::Evolved,
                        _ => return Err(LabError::Config { line, msg: format!("unknown velocity mode {raw:?}") }),
                    }
                }
                "scheme" => {
                    c.scheme = match raw {
                        "explicit" => SchemeKind::Explicit,
                        "implicit" => SchemeKind::Implicit,
                        _ => return Err(LabError::Config { line, msg: format!("unknown scheme {raw:?}") }),
                    }
                }
                "strategy" | "strategy_rho" | "strategy_e" => {
                    let s: FaceStrategy = value(line, key, raw)?;
                    if key != "strategy_e" {
                        c.strategy_rho = s;
                    }
                    if key != "strategy_rho" {
                        c.strategy_e = s;
                    }
                }
                "gamma" => c.gamma = value(line, key, raw)?,
                "end_time" => c.end_time = Some(value(line, key, raw)?),
                "max_steps" => c.max_steps = Some(value(line, key, raw)?),
                "dt_rule" | "dt" | "dt_coef" | "dt_beta" => {}
                "cfl_safety" => c.cfl_safety = value(line, key, raw)?,
                "cfl_margin" => c.cfl_margin = value(line, key, raw)?,
                "stabilization" => c.stabilization.enabled = flag(line, key, raw)?,
                "stab_alpha" => c.stabilization.alpha = value(line, key, raw)?,
                "stab_q" => c.stabilization.q = value(line, key, raw)?,
                "source_e" => c.source_e = value(line, key, raw)?,
                "linear_tol" => c.linear_tol = value(line, key, raw)?,
                "picard_tol" => c.picard_tol = value(line, key, raw)?,
                "picard_max_iter" => c.picard_max_iter = value(line, key, raw)?,
                "modes" => c.modes = value(line, key, raw)?,
                "holder_p" => c.holder_p = value(line, key, raw)?,
                "ladder" => c.ladder = list(line, key, raw)?,
                "csv" => c.write_csv = flag(line, key, raw)?,
                "report" => c.write_report = flag(line, key, raw)?,
                "seed" => c.seed = value(line, key, raw)?,
                _ => {
                    return Err(LabError::Config {
                        line,
                        msg: format!("unknown key {key}"),
                    })
                }
            }
        }
        if get("cells_y").is_none() {
            c.cells_y = c.cells;
        }

        // grouped keys
        let num = |key: &str, default: f64| -> Result<f64> {
            match get(key) {
                Some((line, raw)) => value(line, key, raw),
                None => Ok(default),
            }
        };
        c.initial = match get("initial") {
            None | Some((_, "uniform")) => InitialData::Uniform {
                rho: num("rho0", 1.0)?,
                e: num("e0", 1.0)?,
            },
            Some((_, "gaussian-bump")) => {
                let center = match get("bump_center") {
                    Some((line, raw)) => {
                        let v: Vec<f64> = list(line, "bump_center", raw)?;
                        match v.as_slice() {
                            [x] => [*x, 0.5 * c.length_y],
                            [x, y] => [*x, *y],
                            _ => return Err(LabError::Config { line, msg: "bump_center takes one or two numbers".into() }),
                        }
                    }
                    None => [0.5 * c.length, 0.5 * c.length_y],
                };
                InitialData::GaussianBump {
                    rho_amplitude: num("rho_amplitude", 0.5)?,
                    e_amplitude: num("e_amplitude", 0.5)?,
                    center,
                    width: num("bump_width", 0.15)?,
                }
            }
            Some((line, other)) => {
                return Err(LabError::Config {
                    line,
                    msg: format!("unknown initial data {other:?}"),
                })
            }
        };
        let amplitude = num("velocity_amplitude", 1.0)?;
        if let Some((line, raw)) = get("velocity") {
            c.velocity = VelocityField::from_name(raw, amplitude).map_err(|e| LabError::Config {
                line,
                msg: e.to_string(),
            })?;
        }
        c.time_step = match (get("dt_rule"), get("dt")) {
            (None, None) | (Some((_, "power")), _) => TimeStep::Power {
                coef: num("dt_coef", 0.5)?,
                beta: num("dt_beta", 1.0)?,
            },
            (None | Some((_, "fixed")), Some((line, raw))) => TimeStep::Fixed(value(line, "dt", raw)?),
            (Some((_, "fixed")), None) => return Err(LabError::Invalid("dt_rule = fixed needs dt".into())),
            (Some((_, "cfl")), _) => TimeStep::Cfl,
            (Some((line, other)), _) => {
                return Err(LabError::Config {
                    line,
                    msg: format!("unknown dt_rule {other:?}"),
                })
            }
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(LabError::Invalid(m.to_string()));
        if !(self.dim == 1 || self.dim == 2) {
            return bad("dim must be 1 or 2");
        }
        if self.cells == 0 || (self.dim == 2 && self.cells_y == 0) {
            return bad("cells must be positive");
        }
        if self.end_time.is_none() && self.max_steps.is_none() {
            return bad("set end_time or max_steps");
        }
        if let Some(t) = self.end_time {
            if !(t >= 0.0 && t.is_finite()) {
                return bad("end_time must be finite and >= 0");
            }
        }
        match self.initial {
            InitialData::Uniform { rho, e } if !(rho > 0.0 && e > 0.0) => {
                return bad("initial density and energy must be positive")
            }
            InitialData::GaussianBump {
                rho_amplitude,
                e_amplitude,
                width,
                ..
            } if !(rho_amplitude > 0.0 && e_amplitude > 0.0 && width > 0.0) => {
                return bad("bump amplitudes and width must be positive")
            }
            _ => {}
        }
        match self.time_step {
            TimeStep::Fixed(dt) if !(dt > 0.0) => return bad("dt must be positive"),
            TimeStep::Power { coef, .. } if !(coef > 0.0) => return bad("dt_coef must be positive"),
            TimeStep::Cfl if self.scheme == SchemeKind::Implicit => {
                return bad("dt_rule = cfl applies to the explicit scheme")
            }
            _ => {}
        }
        if self.velocity_kind == VelocityKind::Evolved && (self.scheme != SchemeKind::Explicit || self.dim != 1) {
            return bad("evolved velocity needs the explicit scheme in 1D");
        }
        if self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return bad("ladder resolutions must be strictly increasing");
        }
        if self.modes == 0 {
            return bad("modes must be positive");
        }
        if !(self.holder_p > 1.0) {
            return bad("holder_p must exceed 1");
        }
        if !(self.source_e >= 0.0) {
            return bad("source_e must be nonnegative");
        }
        self.scheme_config()?.validate()?;
        Ok(())
    }

    /// The same configuration at another resolution, keeping the aspect
    /// ratio in 2D.
    pub fn with_cells(&self, cells: usize) -> Self {
        let mut c = self.clone();
        if self.dim == 2 {
            c.cells_y = (self.cells_y * cells / self.cells.max(1)).max(1);
        }
        c.cells = cells;
        c
    }

    pub fn build_mesh(&self) -> Result<Mesh> {
        Ok(match self.dim {
            1 => Mesh::build_1d(self.cells, self.length)?,
            _ => Mesh::build_2d(self.cells, self.cells_y, self.length, self.length_y)?,
        })
    }

    pub fn gas(&self) -> Result<GasParameters> {
        Ok(GasParameters::new(self.gamma)?)
    }

    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        let mut c = SchemeConfig::new(self.gas()?, self.strategy_rho, self.strategy_e);
        c.source_e = if self.source_e > 0.0 {
            EnergySource::Uniform(self.source_e)
        } else {
            EnergySource::Zero
        };
        c.stabilization = self.stabilization;
        c.cfl_safety = self.cfl_safety;
        c.cfl_margin = self.cfl_margin;
        c.linear_tol = self.linear_tol;
        c.picard_tol = self.picard_tol;
        c.picard_max_iter = self.picard_max_iter;
        Ok(c)
    }

    pub fn bound_options(&self) -> BoundOptions {
        BoundOptions {
            modes: self.modes,
            holder_p: self.holder_p,
        }
    }

    pub fn velocity_mode(&self, mesh: &Mesh) -> VelocityMode {
        match self.velocity_kind {
            VelocityKind::Prescribed => VelocityMode::Prescribed(self.velocity.sample(mesh)),
            VelocityKind::Evolved => VelocityMode::Evolved1d,
        }
    }

    pub fn initial_state(&self, mesh: &Mesh) -> Result<State> {
        let n = mesh.n_cells();
        let (rho, e) = match self.initial {
            InitialData::Uniform { rho, e } => (vec![rho; n], vec![e; n]),
            InitialData::GaussianBump {
                rho_amplitude,
                e_amplitude,
                center,
                width,
            } => {
                let bump = |x: [f64; 2]| {
                    let dx = x[0] - center[0];
                    let dy = if mesh.dim() == 2 { x[1] - center[1] } else { 0.0 };
                    (-(dx * dx + dy * dy) / (width * width)).exp()
                };
                mesh.cells()
                    .iter()
                    .map(|c| {
                        let b = bump(c.centroid);
                        (1.0 + rho_amplitude * b, 1.0 + e_amplitude * b)
                    })
                    .unzip()
            }
        };
        Ok(State::new(mesh, rho, e, self.velocity.sample(mesh), self.gas()?)?)
    }

    /// Nominal step for the fixed and power rules.
    pub fn nominal_dt(&self, mesh: &Mesh) -> Option<f64> {
        match self.time_step {
            TimeStep::Fixed(dt) => Some(dt),
            TimeStep::Power { coef, beta } => Some(coef * mesh.h_max().powf(beta)),
            TimeStep::Cfl => None,
        }
    }
}
