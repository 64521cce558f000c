use alloc::vec::Vec;

use crate::entropy::{ConvexFunction, PhiE, PhiRho};
use crate::face_values::{assemble, mass_fluxes, FaceStrategy, Side};
use crate::linalg::SparseMatrix;
use crate::math::abs;
use crate::mesh::Mesh;
use crate::{CellField, Error, FaceField, Result};

use super::explicit::check_dt;
use super::{check_positive, discrete_divergence, pressures, SchemeConfig, SolverStats, State, StepOutcome};

/// Solves the mass balance, then the internal-energy balance, at level `n+1`
/// with the prescribed velocity `u_np1`.
///
/// Upwind face values make both balances linear. Other strategies are handled
/// by a Picard iteration: the difference between the requested face value and
/// the upwind one is frozen at the previous iterate and moved to the
/// right-hand side, so each inner problem keeps the upwind matrix. Face values
/// are re-evaluated on the converged iterate.
pub fn implicit_step(
    mesh: &Mesh,
    state: &State,
    u_np1: &FaceField,
    dt: f64,
    config: &SchemeConfig,
) -> Result<StepOutcome> {
    check_dt(dt)?;
    mesh.check_face_field("velocity", u_np1)?;
    if mesh
        .faces()
        .iter()
        .zip(u_np1)
        .any(|(f, &v)| f.is_boundary() && v != 0.0)
    {
        return Err(Error::InvalidConfig("boundary velocity must vanish"));
    }
    let mut stats = SolverStats::default();

    // mass
    let weights: Vec<f64> = mesh.faces().iter().map(|f| f.measure).collect();
    let mass_rhs: Vec<f64> = mesh
        .cells()
        .iter()
        .zip(&state.rho)
        .map(|(c, &r)| c.measure / dt * r)
        .collect();
    let mass_diag: Vec<f64> = mesh.cells().iter().map(|c| c.measure / dt).collect();
    let rho = solve_transport(
        mesh,
        config,
        config.strategy_rho,
        &PhiRho,
        &weights,
        u_np1,
        &mass_diag,
        &mass_rhs,
        &state.rho,
        &mut stats,
    )?;
    check_positive("density", &rho)?;
    let rho_faces = assemble(mesh, config.strategy_rho, &PhiRho, &rho, u_np1)?;
    let fluxes = mass_fluxes(mesh, &rho_faces, u_np1);

    // internal energy, with p = (γ-1) ρ e folded into the diagonal
    let time = state.time + dt;
    let source = config.source_e.values(mesh, time)?;
    let div = discrete_divergence(mesh, u_np1);
    let g1 = config.gas.gamma() - 1.0;
    let energy_rhs: Vec<f64> = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(k, c)| c.measure / dt * state.rho[k] * state.e[k] + c.measure * source[k])
        .collect();
    let energy_diag: Vec<f64> = mesh
        .cells()
        .iter()
        .enumerate()
        .map(|(k, c)| c.measure / dt * rho[k] + g1 * rho[k] * div[k])
        .collect();
    let face_mass: Vec<f64> = mesh
        .faces()
        .iter()
        .zip(&rho_faces)
        .map(|(f, r)| f.measure * r.value)
        .collect();
    let phi_e = PhiE::new(config.gas);
    let e = solve_transport(
        mesh,
        config,
        config.strategy_e,
        &phi_e,
        &face_mass,
        u_np1,
        &energy_diag,
        &energy_rhs,
        &state.e,
        &mut stats,
    )?;
    check_positive("internal energy", &e)?;
    let e_faces = assemble(mesh, config.strategy_e, &phi_e, &e, u_np1)?;
    let p = pressures(&rho, &e, config.gas)?;

    Ok(StepOutcome {
        state: State {
            rho,
            e,
            p,
            u: u_np1.clone(),
            step: state.step + 1,
            time,
        },
        rho_faces,
        e_faces,
        fluxes,
        u_flux: u_np1.clone(),
        source,
        dt,
        solver: stats,
    })
}

/// Solves `diag_K x_K + Σ_σ w_σ u_{K,σ} x_σ = rhs_K` where `x_σ` is given by
/// `strategy`, and `w_σ` is a per-face weight (`|σ|` or `|σ| ρ_σ`).
#[allow(clippy::too_many_arguments)]
fn solve_transport(
    mesh: &Mesh,
    config: &SchemeConfig,
    strategy: FaceStrategy,
    phi: &dyn ConvexFunction,
    weights: &[f64],
    u: &[f64],
    diag: &[f64],
    rhs: &[f64],
    guess: &[f64],
    stats: &mut SolverStats,
) -> Result<CellField> {
    let n = mesh.n_cells();
    let mut a = SparseMatrix::new(n);
    for (k, &d) in diag.iter().enumerate() {
        a.add(k, k, d);
    }
    for (s, k, l) in mesh.interior_faces() {
        let w = weights[s] * u[s];
        // u along the reference normal is u_{K,σ}, and -u_{K,σ} for L
        if u[s] >= 0.0 {
            a.add(k, k, w);
            a.add(l, k, -w);
        } else {
            a.add(k, l, w);
            a.add(l, l, -w);
        }
    }

    let mut x: CellField = guess.to_vec();
    if strategy == FaceStrategy::Upwind {
        stats.linear_sweeps += a.solve(rhs, &mut x, config.linear_tol, config.linear_max_sweeps)?;
        return Ok(x);
    }

    let mut last_change = f64::INFINITY;
    for _ in 0..config.picard_max_iter {
        let faces = assemble(mesh, strategy, phi, &x, u)?;
        let mut b = rhs.to_vec();
        for (s, k, l) in mesh.interior_faces() {
            let up = match faces[s].upwind {
                Side::K => x[k],
                Side::L => x[l],
            };
            let correction = weights[s] * u[s] * (faces[s].value - up);
            b[k] -= correction;
            b[l] += correction;
        }
        let mut next = x.clone();
        stats.linear_sweeps += a.solve(&b, &mut next, config.linear_tol, config.linear_max_sweeps)?;
        check_positive("Picard iterate", &next)?;
        last_change = next
            .iter()
            .zip(&x)
            .map(|(p, q)| abs(p - q))
            .fold(0.0, f64::max);
        x = next;
        stats.picard_iterations += 1;
        if last_change <= config.picard_tol {
            return Ok(x);
        }
    }
    Err(Error::Picard {
        iterations: config.picard_max_iter,
        residual: last_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::GasParameters;
    use crate::face_values::CandidateRule;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    fn config(strategy: FaceStrategy) -> SchemeConfig {
        SchemeConfig::new(GasParameters::new(1.4).unwrap(), strategy, strategy)
    }

    #[test]
    fn two_cell_upwind_system() {
        // |K| = 1, δt = 1, u = 1 from K to L:
        //   2 ρ_K = 2,  ρ_L - ρ_K = 1
        let mesh = Mesh::build_1d(2, 2.0).unwrap();
        let c = config(FaceStrategy::Upwind);
        let s = State::new(&mesh, vec![2.0, 1.0], vec![1.0; 2], vec![0.0; 3], c.gas).unwrap();
        let out = implicit_step(&mesh, &s, &vec![0.0, 1.0, 0.0], 1.0, &c).unwrap();
        assert_abs_diff_eq!(out.state.rho[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out.state.rho[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_velocity_is_a_fixed_point() {
        let mesh = Mesh::build_1d(3, 1.0).unwrap();
        for strategy in [
            FaceStrategy::Upwind,
            FaceStrategy::Centered,
            FaceStrategy::Limited(CandidateRule::Centered),
        ] {
            let c = config(strategy);
            let s = State::new(&mesh, vec![1.0, 2.0, 0.5], vec![3.0, 1.0, 2.0], vec![0.0; 4], c.gas)
                .unwrap();
            let out = implicit_step(&mesh, &s, &vec![0.0; 4], 0.5, &c).unwrap();
            for k in 0..3 {
                assert_abs_diff_eq!(out.state.rho[k], s.rho[k], epsilon = 1e-13);
                assert_abs_diff_eq!(out.state.e[k], s.e[k], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn limited_step_conserves_mass() {
        let mesh = Mesh::build_1d(8, 1.0).unwrap();
        let c = config(FaceStrategy::Limited(CandidateRule::Centered));
        let rho: Vec<f64> = (0..8).map(|k| 1.0 + 0.1 * k as f64).collect();
        let s = State::new(&mesh, rho.clone(), vec![1.0; 8], vec![0.0; 9], c.gas).unwrap();
        let mut u = vec![0.3; 9];
        u[0] = 0.0;
        u[8] = 0.0;
        let out = implicit_step(&mesh, &s, &u, 0.05, &c).unwrap();
        let before: f64 = rho.iter().sum();
        let after: f64 = out.state.rho.iter().sum();
        assert_abs_diff_eq!(before, after, epsilon = 1e-9);
        assert!(out.solver.picard_iterations > 1);
        for rec in &out.rho_faces {
            assert!(rec.in_interval(1e-14));
        }
    }
}
