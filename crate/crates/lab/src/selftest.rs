//! Seeded property suites behind the `selftest` command.

use eulerfv_core::diagnostics::{cons_noncons, remainder_implicit};
use eulerfv_core::entropy::{
    delta_phi, entropy_identity_residual, entropy_identity_scale, phi_e, solve_xkl, ConvexFunction,
    GasParameters, PhiRho, Square,
};
use eulerfv_core::face_values::{face_value, CandidateRule, FaceStrategy};
use eulerfv_core::mesh::Mesh;
use eulerfv_core::schemes::{
    implicit_step, q_laplacian_1d, stabilization_energy_1d, SchemeConfig, Stabilization, State,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub cases: usize,
    /// Largest violation measure seen; `passed` compares it to `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl SelfCheck {
    fn new(name: &'static str, cases: usize, worst: f64, tolerance: f64) -> Self {
        SelfCheck {
            name,
            cases,
            worst,
            tolerance,
            passed: worst <= tolerance,
        }
    }
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.random_range(lo.log10()..hi.log10()))
}

fn random_gamma(rng: &mut impl Rng) -> f64 {
    rng.random_range(1.0001..=5.0)
}

/// `ρφ_ρ' - φ_ρ + φ_e' p`, relative to the size of its terms, for
/// `ρ, e ∈ [1e-3, 1e3]`, `γ ∈ (1, 5]`.
pub fn entropy_identity(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let rho = log_uniform(rng, 1e-3, 1e3);
        let e = log_uniform(rng, 1e-3, 1e3);
        let gas = GasParameters::new(random_gamma(rng))?;
        let r = entropy_identity_residual(rho, e, gas)?;
        worst = worst.max(r.abs() / entropy_identity_scale(rho, e, gas)?.max(1.0));
    }
    Ok(SelfCheck::new("entropy_identity", cases, worst, 1e-13))
}

/// Distance of `x_KL` outside `|[x_K, x_L]|`, relative to `max(x_K, x_L)`,
/// for `φ_ρ`, `φ_e` and `z²`.
pub fn xkl_membership(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let a = log_uniform(rng, 1e-3, 1e3);
        let b = log_uniform(rng, 1e-3, 1e3);
        let g = GasParameters::new(random_gamma(rng))?;
        let functions: [&dyn ConvexFunction; 3] = [&PhiRho, &phi_e(g), &Square];
        for phi in functions {
            let x = solve_xkl(phi, a, b)?;
            let outside = (a.min(b) - x).max(x - a.max(b)).max(0.0);
            worst = worst.max(outside / a.max(b));
        }
    }
    Ok(SelfCheck::new("xkl_membership", 3 * cases, worst, 0.0))
}

pub fn delta_phi_symmetry(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let (a, b, s) = (
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
            rng.random_range(0.5..2.0),
        );
        let g = GasParameters::new(random_gamma(rng))?;
        let functions: [&dyn ConvexFunction; 3] = [&PhiRho, &phi_e(g), &Square];
        for phi in functions {
            worst = worst.max((delta_phi(phi, a, b, s)? - delta_phi(phi, b, a, s)?).abs());
        }
    }
    Ok(SelfCheck::new("delta_phi_symmetry", 3 * cases, worst, 1e-12))
}

/// Upwind and limited face values lie in their admissible interval.
pub fn limited_admissible(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut failures = 0usize;
    for _ in 0..cases {
        let a = log_uniform(rng, 1e-3, 1e3);
        let b = log_uniform(rng, 1e-3, 1e3);
        let u = rng.random_range(-1.0..1.0);
        let rule = if rng.random_bool(0.5) {
            CandidateRule::Centered
        } else {
            CandidateRule::Downwind
        };
        let g = GasParameters::new(random_gamma(rng))?;
        let functions: [&dyn ConvexFunction; 3] = [&PhiRho, &phi_e(g), &Square];
        for phi in functions {
            for strategy in [FaceStrategy::Upwind, FaceStrategy::Limited(rule)] {
                if !face_value(strategy, phi, a, b, u)?.in_interval(1e-12 * a.max(b)) {
                    failures += 1;
                }
            }
        }
    }
    Ok(SelfCheck::new("limited_admissible", 6 * cases, failures as f64, 0.0))
}

/// Both forms of the convection operator on random fields and fluxes, with
/// `ρ^{n+1}` from the discrete mass balance.
pub fn cons_noncons_identity(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let mesh = if rng.random_bool(0.5) {
            Mesh::build_1d(rng.random_range(2..40), rng.random_range(0.5..2.0))?
        } else {
            Mesh::build_2d(rng.random_range(1..8), rng.random_range(1..8), 1.0, rng.random_range(0.5..2.0))?
        };
        let nc = mesh.n_cells();
        let nf = mesh.n_faces();
        let dt = rng.random_range(0.01..0.5);
        let mut cell = |lo: f64, hi: f64| -> Vec<f64> { (0..nc).map(|_| rng.random_range(lo..hi)).collect() };
        let rho_n = cell(0.5, 2.0);
        let z_n = cell(-2.0, 2.0);
        let z_np1 = cell(-2.0, 2.0);
        let z_faces: Vec<f64> = (0..nf).map(|_| rng.random_range(-2.0..2.0)).collect();
        let fluxes: Vec<f64> = mesh
            .faces()
            .iter()
            .map(|f| if f.is_boundary() { 0.0 } else { rng.random_range(-1.0..1.0) })
            .collect();
        let mut rho_np1 = rho_n.clone();
        for (k, c) in mesh.cells().iter().enumerate() {
            let out: f64 = c.faces.iter().map(|&s| mesh.orientation(k, s) * fluxes[s]).sum();
            rho_np1[k] -= dt / c.measure * out;
        }
        let (lhs, rhs) = cons_noncons(&mesh, &rho_n, &rho_np1, &z_n, &z_np1, &z_faces, &fluxes, dt)?;
        for (a, b) in lhs.iter().zip(&rhs) {
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
    }
    Ok(SelfCheck::new("cons_noncons", cases, worst, 1e-12))
}

/// `Σ_σ |D_σ|(-Δ_q u)_σ u_σ = Σ_K h_K |δ_K u/h_K|^q` on random 1D fields,
/// relative to the right side.
pub fn summation_by_parts(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(2..64);
        let mesh = Mesh::build_1d(n, rng.random_range(0.5..2.0))?;
        let mut u: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
        u[0] = 0.0;
        u[n] = 0.0;
        for q in [2.0, 3.0, 4.0] {
            let lap = q_laplacian_1d(&mesh, &u, q)?;
            let lhs: f64 = lap.iter().zip(&u).map(|(a, b)| a * b).sum();
            let rhs = stabilization_energy_1d(&mesh, &u, q)?;
            worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
        }
    }
    Ok(SelfCheck::new("summation_by_parts", 3 * cases, worst, 1e-12))
}

/// The default stabilization passes its check and `q = 2, α = 1` fails it.
pub fn stabilization_defaults() -> SelfCheck {
    let default_ok = Stabilization::default().check().is_ok();
    let rejected = Stabilization {
        alpha: 1.0,
        q: 2.0,
        enabled: true,
    }
    .check()
    .is_err();
    let failures = usize::from(!default_ok) + usize::from(!rejected);
    SelfCheck::new("stabilization_defaults", 2, failures as f64, 0.0)
}

/// `Σ_K |K| δR_K` after one implicit limited step on random data.
pub fn delta_r_conservative(rng: &mut impl Rng, cases: usize) -> Result<SelfCheck> {
    let mut worst: f64 = 0.0;
    let gas = GasParameters::new(1.4)?;
    let c = SchemeConfig::new(
        gas,
        FaceStrategy::Limited(CandidateRule::Centered),
        FaceStrategy::Limited(CandidateRule::Centered),
    );
    for _ in 0..cases {
        let mesh = Mesh::build_2d(rng.random_range(2..6), rng.random_range(2..6), 1.0, 1.0)?;
        let nc = mesh.n_cells();
        let rho: Vec<f64> = (0..nc).map(|_| rng.random_range(0.5..2.0)).collect();
        let e: Vec<f64> = (0..nc).map(|_| rng.random_range(0.5..2.0)).collect();
        let u: Vec<f64> = mesh
            .faces()
            .iter()
            .map(|f| if f.is_boundary() { 0.0 } else { rng.random_range(-1.0..1.0) })
            .collect();
        let s = State::new(&mesh, rho, e, vec![0.0; mesh.n_faces()], gas)?;
        let out = implicit_step(&mesh, &s, &u, 0.05, &c)?;
        let r = remainder_implicit(&mesh, &s, &out, gas)?;
        for f in [&r.delta_rm, &r.delta_re] {
            let total: f64 = mesh.cells().iter().zip(f).map(|(c, v)| c.measure * v).sum();
            worst = worst.max(total.abs());
        }
    }
    Ok(SelfCheck::new("delta_r_conservative", 2 * cases, worst, 1e-12))
}

/// Every suite with its default size.
pub fn selftest(seed: u64) -> Result<Vec<SelfCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        entropy_identity(&mut rng, 10_000)?,
        xkl_membership(&mut rng, 10_000)?,
        delta_phi_symmetry(&mut rng, 1_000)?,
        limited_admissible(&mut rng, 1_000)?,
        cons_noncons_identity(&mut rng, 100)?,
        summation_by_parts(&mut rng, 100)?,
        stabilization_defaults(),
        delta_r_conservative(&mut rng, 20)?,
    ])
}
