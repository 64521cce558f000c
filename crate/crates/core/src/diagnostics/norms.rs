//! Discrete norms of cell-field time series.
//!
//! A series holds one cell field per time level together with a weight per
//! level (the time step attached to that level) and, for the weak norm, the
//! time of the level.

use alloc::vec;

use core::f64::consts::PI;

use crate::math::{abs, sin};
use crate::mesh::Mesh;
use crate::{CellField, Error, Result};

fn check_lengths(what: &'static str, a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::SizeMismatch {
            what,
            expected: a,
            found: b,
        })
    }
}

/// `Σ_n w_n Σ_{σ=K|L} |σ| |z_L^n - z_K^n|`.
pub fn norm_bv_space(mesh: &Mesh, series: &[CellField], weights: &[f64]) -> Result<f64> {
    check_lengths("series weights", series.len(), weights.len())?;
    let mut total = 0.0;
    for (z, &w) in series.iter().zip(weights) {
        mesh.check_cell_field("series level", z)?;
        let level: f64 = mesh
            .interior_faces()
            .map(|(s, k, l)| mesh.face(s).measure * abs(z[l] - z[k]))
            .sum();
        total += w * level;
    }
    Ok(total)
}

/// `Σ_n Σ_K |K| |z_K^{n+1} - z_K^n|`.
pub fn norm_bv_time(mesh: &Mesh, series: &[CellField]) -> Result<f64> {
    let mut total = 0.0;
    for pair in series.windows(2) {
        mesh.check_cell_field("series level", &pair[0])?;
        mesh.check_cell_field("series level", &pair[1])?;
        total += mesh
            .cells()
            .iter()
            .enumerate()
            .map(|(k, c)| c.measure * abs(pair[1][k] - pair[0][k]))
            .sum::<f64>();
    }
    Ok(total)
}

/// `Σ_n w_n Σ_K |K| |z_K^n|`.
pub fn norm_l1(mesh: &Mesh, series: &[CellField], weights: &[f64]) -> Result<f64> {
    check_lengths("series weights", series.len(), weights.len())?;
    let mut total = 0.0;
    for (z, &w) in series.iter().zip(weights) {
        mesh.check_cell_field("series level", z)?;
        total += w * mesh
            .cells()
            .iter()
            .zip(z)
            .map(|(c, v)| c.measure * abs(*v))
            .sum::<f64>();
    }
    Ok(total)
}

/// Lower bound of the weak `-1,1` norm obtained by restricting the supremum
/// to the test functions
/// `ψ(x, t) = sin(kπx₁/L₁) [sin(lπx₂/L₂)] (1 - t/T)`, `1 ≤ k, l ≤ modes`,
/// each normalised by the exact supremum of its gradient.
pub fn norm_weak_m11(
    mesh: &Mesh,
    series: &[CellField],
    weights: &[f64],
    times: &[f64],
    final_time: f64,
    modes: usize,
) -> Result<f64> {
    check_lengths("series weights", series.len(), weights.len())?;
    check_lengths("series times", series.len(), times.len())?;
    if modes == 0 {
        return Err(Error::InvalidConfig("weak norm needs at least one mode"));
    }
    if series.is_empty() {
        return Ok(0.0);
    }
    if !(final_time > 0.0) {
        return Err(Error::InvalidConfig("weak norm needs a positive final time"));
    }
    // the time factor is shared by all modes
    let mut integrated = vec![0.0; mesh.n_cells()];
    for ((z, &w), &t) in series.iter().zip(weights).zip(times) {
        mesh.check_cell_field("series level", z)?;
        let factor = w * (1.0 - t / final_time);
        for (acc, v) in integrated.iter_mut().zip(z) {
            *acc += factor * v;
        }
    }
    let [l1, l2] = mesh.extent();
    let ly_modes = if mesh.dim() == 2 { modes } else { 1 };
    let mut best: f64 = 0.0;
    for k in 1..=modes {
        let ak = k as f64 * PI / l1;
        for l in 1..=ly_modes {
            let bl = l as f64 * PI / l2;
            let (grad, pairing) = if mesh.dim() == 2 {
                let p: f64 = mesh
                    .cells()
                    .iter()
                    .zip(&integrated)
                    .map(|(c, a)| c.measure * a * sin(ak * c.centroid[0]) * sin(bl * c.centroid[1]))
                    .sum();
                (ak.max(bl), p)
            } else {
                let p: f64 = mesh
                    .cells()
                    .iter()
                    .zip(&integrated)
                    .map(|(c, a)| c.measure * a * sin(ak * c.centroid[0]))
                    .sum();
                (ak, p)
            };
            best = best.max(abs(pairing) / grad);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bv_space_by_hand() {
        let mesh = Mesh::build_1d(3, 3.0).unwrap();
        let z = vec![1.0, 2.0, 4.0];
        assert_eq!(norm_bv_space(&mesh, core::slice::from_ref(&z), &[1.0]).unwrap(), 3.0);
        let scaled: Vec<f64> = z.iter().map(|v| -2.0 * v).collect();
        assert_eq!(norm_bv_space(&mesh, &[scaled], &[1.0]).unwrap(), 6.0);
        assert_eq!(norm_bv_space(&mesh, &[vec![5.0; 3]], &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn bv_time_by_hand() {
        let mesh = Mesh::build_1d(1, 2.0).unwrap();
        let series = [vec![1.0], vec![3.0], vec![0.0]];
        assert_eq!(norm_bv_time(&mesh, &series).unwrap(), 10.0);
        assert_eq!(norm_bv_time(&mesh, &[vec![1.0], vec![1.0]]).unwrap(), 0.0);
    }

    #[test]
    fn weak_norm_basics() {
        let mesh = Mesh::build_1d(16, 1.0).unwrap();
        let zero = vec![0.0; 16];
        assert_eq!(
            norm_weak_m11(&mesh, &[zero], &[0.1], &[0.1], 1.0, 4).unwrap(),
            0.0
        );
        let z: Vec<f64> = mesh.cells().iter().map(|c| c.centroid[0] - 0.3).collect();
        let few = norm_weak_m11(&mesh, core::slice::from_ref(&z), &[0.1], &[0.0], 1.0, 2).unwrap();
        let many = norm_weak_m11(&mesh, &[z], &[0.1], &[0.0], 1.0, 8).unwrap();
        assert!(many >= few && few > 0.0);
    }

    #[test]
    fn weak_norm_single_mode_by_hand() {
        // z = sin(πx) on a fine mesh: pairing ≈ δt/2, gradient sup = π
        let mesh = Mesh::build_1d(400, 1.0).unwrap();
        let z: Vec<f64> = mesh.cells().iter().map(|c| sin(PI * c.centroid[0])).collect();
        let n = norm_weak_m11(&mesh, &[z], &[1.0], &[0.0], 1.0, 1).unwrap();
        assert_abs_diff_eq!(n, 0.5 / PI, epsilon = 1e-5);
    }
}
