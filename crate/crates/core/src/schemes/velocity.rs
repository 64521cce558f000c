//! Prescribed velocity fields and the discrete `L^q(W^{1,q})` velocity norm.

use core::f64::consts::PI;
use core::str::FromStr;

use crate::math::{abs, powf, sin};
use crate::mesh::Mesh;
use crate::{Error, FaceField, Result};

/// Analytic velocity sampled at face centroids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VelocityField {
    Zero,
    /// `u = (A sin(πx/L_x), 0)`.
    Sine { amplitude: f64 },
    /// `u = A sin(πx/L_x) sin(πy/L_y) (1, 1)`.
    Sine2d { amplitude: f64 },
}

impl VelocityField {
    pub fn from_name(name: &str, amplitude: f64) -> Result<Self> {
        match name {
            "zero" => Ok(VelocityField::Zero),
            "sine" => Ok(VelocityField::Sine { amplitude }),
            "sine2d" => Ok(VelocityField::Sine2d { amplitude }),
            _ => Err(Error::InvalidConfig("unknown velocity field")),
        }
    }

    pub fn vector(&self, mesh: &Mesh, x: [f64; 2]) -> [f64; 2] {
        let [lx, ly] = mesh.extent();
        match *self {
            VelocityField::Zero => [0.0, 0.0],
            VelocityField::Sine { amplitude } => [amplitude * sin(PI * x[0] / lx), 0.0],
            VelocityField::Sine2d { amplitude } => {
                let v = if mesh.dim() == 1 {
                    amplitude * sin(PI * x[0] / lx)
                } else {
                    amplitude * sin(PI * x[0] / lx) * sin(PI * x[1] / ly)
                };
                [v, v]
            }
        }
    }

    /// Normal components along each face's reference normal, zero on the
    /// boundary.
    pub fn sample(&self, mesh: &Mesh) -> FaceField {
        mesh.faces()
            .iter()
            .map(|f| {
                if f.is_boundary() {
                    0.0
                } else {
                    let v = self.vector(mesh, f.centroid);
                    v[0] * f.normal[0] + v[1] * f.normal[1]
                }
            })
            .collect()
    }
}

impl FromStr for VelocityField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VelocityField::from_name(s, 1.0)
    }
}

/// `[Σ_i Σ_n δt_n Σ_K Σ_{(σ,σ')∈E(K)²} |K| |(u_{σ,i} - u_{σ',i}) / h_K|^q]^{1/q}`.
///
/// The face velocity vector is taken as `u_σ n_σ`, its normal part, which is
/// consistent with the normal components the schemes use.
pub fn velocity_norm_w1q(mesh: &Mesh, series: &[FaceField], weights: &[f64], q: f64) -> Result<f64> {
    if series.len() != weights.len() {
        return Err(Error::SizeMismatch {
            what: "velocity series weights",
            expected: series.len(),
            found: weights.len(),
        });
    }
    if !(q >= 1.0) {
        return Err(Error::InvalidConfig("velocity norm exponent must be >= 1"));
    }
    let mut total = 0.0;
    for (u, &w) in series.iter().zip(weights) {
        mesh.check_face_field("velocity", u)?;
        let mut level = 0.0;
        for cell in mesh.cells() {
            let mut cell_sum = 0.0;
            for i in 0..mesh.dim() {
                for &a in &cell.faces {
                    let ua = u[a] * mesh.face(a).normal[i];
                    for &b in &cell.faces {
                        let ub = u[b] * mesh.face(b).normal[i];
                        cell_sum += powf(abs(ua - ub) / cell.diameter, q);
                    }
                }
            }
            level += cell.measure * cell_sum;
        }
        total += w * level;
    }
    Ok(powf(total, 1.0 / q))
}
