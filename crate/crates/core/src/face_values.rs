//! Face values of density and internal energy in the convection fluxes.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::entropy::{solve_xkl, ConvexFunction};
use crate::mesh::Mesh;
use crate::{Error, Result};

/// Value proposed to the limiter before clamping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CandidateRule {
    /// `(x_K + x_L) / 2`.
    #[default]
    Centered,
    /// The value on the downstream side.
    Downwind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceStrategy {
    Upwind,
    Centered,
    Limited(CandidateRule),
}

impl FaceStrategy {
    /// True when every face value is guaranteed to lie in its admissible interval.
    pub fn satisfies_hypothesis(&self) -> bool {
        !matches!(self, FaceStrategy::Centered)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FaceStrategy::Upwind => "upwind",
            FaceStrategy::Centered => "centered",
            FaceStrategy::Limited(CandidateRule::Centered) => "limited",
            FaceStrategy::Limited(CandidateRule::Downwind) => "limited-downwind",
        }
    }
}

impl fmt::Display for FaceStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FaceStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upwind" => Ok(FaceStrategy::Upwind),
            "centered" => Ok(FaceStrategy::Centered),
            "limited" => Ok(FaceStrategy::Limited(CandidateRule::Centered)),
            "limited-downwind" => Ok(FaceStrategy::Limited(CandidateRule::Downwind)),
            _ => Err(Error::InvalidConfig("unknown face strategy")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    K,
    L,
}

/// A face value together with the interval it was required to lie in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceValueRecord {
    pub value: f64,
    /// Admissible interval; `None` for the centered strategy.
    pub interval: Option<(f64, f64)>,
    pub upwind: Side,
}

impl FaceValueRecord {
    /// Membership of `value` in its admissible interval, up to `tol`.
    pub fn in_interval(&self, tol: f64) -> bool {
        match self.interval {
            Some((lo, hi)) => self.value >= lo - tol && self.value <= hi + tol,
            None => false,
        }
    }
}

/// `|[x_K, x_KL]|` when `u_{K,σ} ≥ 0`, `|[x_L, x_KL]|` otherwise, as `(lo, hi)`.
pub fn admissible_interval(
    phi: &dyn ConvexFunction,
    x_k: f64,
    x_l: f64,
    u_k_sigma: f64,
) -> Result<(f64, f64)> {
    let x_kl = solve_xkl(phi, x_k, x_l)?;
    let up = if u_k_sigma >= 0.0 { x_k } else { x_l };
    Ok((up.min(x_kl), up.max(x_kl)))
}

pub fn face_value(
    strategy: FaceStrategy,
    phi: &dyn ConvexFunction,
    x_k: f64,
    x_l: f64,
    u_k_sigma: f64,
) -> Result<FaceValueRecord> {
    let (upwind, up_value, down_value) = if u_k_sigma >= 0.0 {
        (Side::K, x_k, x_l)
    } else {
        (Side::L, x_l, x_k)
    };
    match strategy {
        FaceStrategy::Upwind => Ok(FaceValueRecord {
            value: up_value,
            interval: Some(admissible_interval(phi, x_k, x_l, u_k_sigma)?),
            upwind,
        }),
        FaceStrategy::Centered => {
            // validates the arguments like the other strategies
            solve_xkl(phi, x_k, x_l)?;
            Ok(FaceValueRecord {
                value: 0.5 * (x_k + x_l),
                interval: None,
                upwind,
            })
        }
        FaceStrategy::Limited(rule) => {
            let (lo, hi) = admissible_interval(phi, x_k, x_l, u_k_sigma)?;
            let candidate = match rule {
                CandidateRule::Centered => 0.5 * (x_k + x_l),
                CandidateRule::Downwind => down_value,
            };
            Ok(FaceValueRecord {
                value: candidate.clamp(lo, hi),
                interval: Some((lo, hi)),
                upwind,
            })
        }
    }
}

/// `F_{K,σ} = |σ| ρ_σ u_{K,σ}`.
pub fn mass_flux(face_measure: f64, rho_sigma: f64, u_k_sigma: f64) -> f64 {
    face_measure * rho_sigma * u_k_sigma
}

/// Face values on every face of `mesh` for the cell field `x` and the face
/// velocity `u` (oriented along each face's reference normal).
///
/// Boundary faces carry no flux; their record holds the inner cell value.
pub fn assemble(
    mesh: &Mesh,
    strategy: FaceStrategy,
    phi: &dyn ConvexFunction,
    x: &[f64],
    u: &[f64],
) -> Result<Vec<FaceValueRecord>> {
    mesh.check_cell_field("face value input", x)?;
    mesh.check_face_field("face velocity", u)?;
    mesh.faces()
        .iter()
        .zip(u)
        .map(|(face, &u_s)| match face.cells {
            (k, Some(l)) => face_value(strategy, phi, x[k], x[l], u_s),
            (k, None) => Ok(FaceValueRecord {
                value: x[k],
                interval: Some((x[k], x[k])),
                upwind: Side::K,
            }),
        })
        .collect()
}

/// Mass fluxes along each face's reference normal.
pub fn mass_fluxes(mesh: &Mesh, rho_faces: &[FaceValueRecord], u: &[f64]) -> Vec<f64> {
    mesh.faces()
        .iter()
        .zip(rho_faces.iter().zip(u))
        .map(|(face, (rec, &u_s))| {
            if face.is_boundary() {
                0.0
            } else {
                mass_flux(face.measure, rec.value, u_s)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{PhiRho, Square};
    use approx::assert_abs_diff_eq;

    const E: f64 = core::f64::consts::E;

    #[test]
    fn interval_examples() {
        assert_eq!(admissible_interval(&Square, 1.0, 3.0, 1.0).unwrap(), (1.0, 2.0));
        assert_eq!(admissible_interval(&PhiRho, 4.0, 4.0, -1.0).unwrap(), (4.0, 4.0));
        let (lo, hi) = admissible_interval(&PhiRho, 1.0, E, -1.0).unwrap();
        assert_abs_diff_eq!(lo, E - 1.0, epsilon = 1e-14);
        assert_eq!(hi, E);
    }

    #[test]
    fn upwind_examples() {
        let r = face_value(FaceStrategy::Upwind, &PhiRho, 1.0, 2.0, 1.0).unwrap();
        assert_eq!((r.value, r.upwind), (1.0, Side::K));
        let r = face_value(FaceStrategy::Upwind, &PhiRho, 1.0, 2.0, -1.0).unwrap();
        assert_eq!((r.value, r.upwind), (2.0, Side::L));
        assert!(r.in_interval(0.0));
    }

    #[test]
    fn limited_examples() {
        let limited = FaceStrategy::Limited(CandidateRule::Centered);
        let r = face_value(limited, &Square, 1.0, 3.0, 1.0).unwrap();
        assert_eq!(r.value, 2.0);
        let r = face_value(limited, &PhiRho, 1.0, E, 1.0).unwrap();
        assert_abs_diff_eq!(r.value, E - 1.0, epsilon = 1e-14);
        let r = face_value(FaceStrategy::Limited(CandidateRule::Downwind), &PhiRho, 1.0, E, 1.0)
            .unwrap();
        assert_abs_diff_eq!(r.value, E - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn centered_has_no_interval() {
        let r = face_value(FaceStrategy::Centered, &PhiRho, 1.0, 3.0, 1.0).unwrap();
        assert_eq!(r.value, 2.0);
        assert!(r.interval.is_none());
        assert!(!r.in_interval(1.0));
    }

    #[test]
    fn flux_examples() {
        assert_eq!(mass_flux(1.0, 2.0, 3.0), 6.0);
        assert_eq!(mass_flux(0.5, 1.0, -2.0), -1.0);
        assert_eq!(mass_flux(0.5, 1.0, 0.0), 0.0);
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in ["upwind", "centered", "limited", "limited-downwind"] {
            assert_eq!(s.parse::<FaceStrategy>().unwrap().name(), s);
        }
        assert!("muscl".parse::<FaceStrategy>().is_err());
    }
}
