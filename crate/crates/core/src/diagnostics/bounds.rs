//! Bounds on the remainder terms, evaluated on a recorded run.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::entropy::{deriv_sup, second_sup, PhiE, PhiRho};
use crate::face_values::FaceStrategy;
use crate::math::{abs, powf};
use crate::mesh::Mesh;
use crate::schemes::velocity_norm_w1q;
use crate::{CellField, Error, Result};

use super::norms::{norm_bv_space, norm_bv_time, norm_l1, norm_weak_m11};
use super::{RunHistory, SchemeKind};

/// Run-wide constants of the bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    /// `max(1, ρ, 1/ρ, e, 1/e, |u|)` over every level, cell and face.
    pub m: f64,
    pub phi_rho_prime_inf: f64,
    pub phi_e_prime_inf: f64,
    pub phi_rho_second_inf: f64,
    pub phi_e_second_inf: f64,
}

impl BoundConstants {
    pub fn from_history(history: &RunHistory) -> Result<Self> {
        let mut m: f64 = 1.0;
        for s in &history.levels {
            for &v in s.rho.iter().chain(&s.e) {
                m = m.max(v).max(1.0 / v);
            }
            for &v in &s.u {
                m = m.max(abs(v));
            }
        }
        for d in &history.steps {
            for &v in &d.velocity {
                m = m.max(abs(v));
            }
        }
        let phi_e = PhiE::new(history.gas);
        Ok(BoundConstants {
            m,
            phi_rho_prime_inf: deriv_sup(&PhiRho, m)?,
            phi_e_prime_inf: deriv_sup(&phi_e, m)?,
            phi_rho_second_inf: second_sup(&PhiRho, m)?,
            phi_e_second_inf: second_sup(&phi_e, m)?,
        })
    }
}

/// Options of [`check_bounds`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundOptions {
    /// Number of sine modes per direction of the weak-norm surrogate.
    pub modes: usize,
    /// Hölder exponent `p > 1` of the `R₀₁` bound; `q = p/(p-1)`.
    pub holder_p: f64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            modes: 8,
            holder_p: 2.0,
        }
    }
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// Norm used on the left and any calibrated constant.
    pub note: String,
}

impl BoundEntry {
    fn new(name: &'static str, lhs: f64, rhs: f64, note: String) -> Self {
        BoundEntry {
            name,
            lhs,
            rhs,
            satisfied: lhs <= rhs,
            note,
        }
    }
}

fn sum_series(a: &[CellField], b: &[CellField]) -> Vec<CellField> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

/// The constant in the `R₀₁` bound, from the face-pair sums over each cell:
/// `max(2 N², 2 (d N²)^{1/p} 2^{(p-1)/p})` with `N` the maximal number of
/// faces per cell.
pub fn r01_constant(mesh: &Mesh, holder_p: f64) -> f64 {
    let n = mesh.max_faces_per_cell() as f64;
    let d = mesh.dim() as f64;
    let pair = 2.0 * n * n;
    let holder = 2.0 * powf(d * n * n, 1.0 / holder_p) * powf(2.0, (holder_p - 1.0) / holder_p);
    pair.max(holder)
}

/// Evaluates every bound that applies to the run.
///
/// Implicit runs, per strategy satisfying the hypotheses: `cons_rho`
/// (`‖δR_m‖_{-1,1} ≤ 3M|φ_ρ'|_∞‖ρ‖_BV h_M`), `cons_e` (`3M²|φ_e'|_∞`), and when
/// both do, `impl_muscl` on `δR_m + δR_e`. BV norms run over the levels
/// `n+1`.
///
/// Explicit runs: the same consistency bounds on `δR₂` with BV norms over the
/// levels `n`; `remainder_ex_rho` and `remainder_ex_e` on `R`; `pressure_work`
/// on `R_pw`; Case 1 bounds on `R_η,1` and `R_η,2` when both strategies
/// satisfy the hypotheses; and for upwind runs the `R₀₁` bound and the Case 2
/// bound on `R₀₁ + R_pw`.
pub fn check_bounds(
    mesh: &Mesh,
    history: &RunHistory,
    constants: &BoundConstants,
    options: BoundOptions,
) -> Result<Vec<BoundEntry>> {
    let mut out = Vec::new();
    if history.steps.is_empty() {
        return Ok(out);
    }
    let c = constants;
    let m = c.m;
    let h = mesh.h_max();
    let h_low = mesh.h_underline();
    let dts = history.dts();
    let times = history.times();
    let t_final = history.final_time();
    let dt_max = dts.iter().copied().fold(0.0, f64::max);
    let modes = options.modes;
    let weak = |series: &[CellField]| norm_weak_m11(mesh, series, &dts, &times, t_final, modes);
    let l1 = |series: &[CellField]| norm_l1(mesh, series, &dts);
    let weak_note = || format!("weak norm over {} sine modes", modes);
    let l1_note = || String::from("L1 norm");

    let rho: Vec<CellField> = history.levels.iter().map(|s| s.rho.clone()).collect();
    let e: Vec<CellField> = history.levels.iter().map(|s| s.e.clone()).collect();
    let n_steps = history.steps.len();
    let (bv_rho, bv_e) = match history.kind {
        SchemeKind::Implicit => (
            norm_bv_space(mesh, &rho[1..], &dts)?,
            norm_bv_space(mesh, &e[1..], &dts)?,
        ),
        SchemeKind::Explicit => (
            norm_bv_space(mesh, &rho[..n_steps], &dts)?,
            norm_bv_space(mesh, &e[..n_steps], &dts)?,
        ),
    };
    let h_rho = history.strategy_rho.satisfies_hypothesis();
    let h_e = history.strategy_e.satisfies_hypothesis();
    let cons_rho = 3.0 * m * c.phi_rho_prime_inf * bv_rho * h;
    let cons_e = 3.0 * m * m * c.phi_e_prime_inf * bv_e * h;

    match history.kind {
        SchemeKind::Implicit => {
            let drm = history.remainder_series("delta_Rm");
            let dre = history.remainder_series("delta_Re");
            if h_rho {
                out.push(BoundEntry::new("cons_rho", weak(&drm)?, cons_rho, weak_note()));
            }
            if h_e {
                out.push(BoundEntry::new("cons_e", weak(&dre)?, cons_e, weak_note()));
            }
            if h_rho && h_e {
                let lhs = weak(&sum_series(&drm, &dre))?;
                out.push(BoundEntry::new("impl_muscl", lhs, cons_rho + cons_e, weak_note()));
            }
        }
        SchemeKind::Explicit => {
            let tbv_rho = norm_bv_time(mesh, &rho)?;
            let tbv_e = norm_bv_time(mesh, &e)?;
            let g = history.gas.gamma();
            let rem_rho = m * m * c.phi_rho_second_inf * tbv_rho * dt_max / h_low;
            let rem_e = m * m * m * c.phi_e_second_inf * tbv_e * dt_max / h_low;
            let pw = (g - 1.0) * rem_e;
            if h_rho {
                let lhs = weak(&history.remainder_series("delta_R2_m"))?;
                out.push(BoundEntry::new("cons_rho", lhs, cons_rho, weak_note()));
            }
            if h_e {
                let lhs = weak(&history.remainder_series("delta_R2_e"))?;
                out.push(BoundEntry::new("cons_e", lhs, cons_e, weak_note()));
            }
            out.push(BoundEntry::new(
                "remainder_ex_rho",
                l1(&history.remainder_series("R_m"))?,
                rem_rho,
                l1_note(),
            ));
            out.push(BoundEntry::new(
                "remainder_ex_e",
                l1(&history.remainder_series("R_e"))?,
                rem_e,
                l1_note(),
            ));
            out.push(BoundEntry::new(
                "pressure_work",
                l1(&history.remainder_series("R_pw"))?,
                pw,
                l1_note(),
            ));
            if h_rho && h_e {
                out.push(BoundEntry::new(
                    "case1_r_eta_1",
                    weak(&history.remainder_series("R_eta_1"))?,
                    cons_rho + cons_e,
                    weak_note(),
                ));
                out.push(BoundEntry::new(
                    "case1_r_eta_2",
                    l1(&history.remainder_series("R_eta_2"))?,
                    rem_rho + rem_e + pw,
                    l1_note(),
                ));
            }
            if history.strategy_rho == FaceStrategy::Upwind && history.strategy_e == FaceStrategy::Upwind {
                let p = options.holder_p;
                if !(p > 1.0) {
                    return Err(Error::InvalidConfig("holder_p must exceed 1"));
                }
                let q = p / (p - 1.0);
                let velocities: Vec<CellField> = history.steps.iter().map(|s| s.velocity.clone()).collect();
                let u_norm = velocity_norm_w1q(mesh, &velocities, &dts, q)?;
                let cc = r01_constant(mesh, p) * mesh.regularity_cm();
                let tail = u_norm * powf(dt_max, 1.0 / p);
                let r01 = cc
                    * powf(m, (2.0 * p - 1.0) / p)
                    * c.phi_rho_second_inf
                    * powf(tbv_rho, 1.0 / p)
                    * tail;
                let r_pw = cc
                    * (g - 1.0)
                    * powf(m, (3.0 * p - 1.0) / p)
                    * c.phi_e_second_inf
                    * powf(tbv_e, 1.0 / p)
                    * tail;
                let note = format!("L1 norm, C = {}, p = {}", r01_constant(mesh, p), p);
                out.push(BoundEntry::new(
                    "r01",
                    l1(&history.remainder_series("R01"))?,
                    r01,
                    note.clone(),
                ));
                out.push(BoundEntry::new(
                    "case2_r_eta",
                    l1(&history.remainder_series("R_eta_case2"))?,
                    r01 + r_pw,
                    note,
                ));
            }
        }
    }
    Ok(out)
}
