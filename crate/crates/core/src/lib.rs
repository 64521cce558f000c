//! Finite-volume schemes for the compressible Euler equations written in
//! internal-energy form, together with the machinery needed to check their
//! discrete entropy behaviour.
//!
//! The crate is `no_std` (it only needs `alloc`). It covers:
//!
//! - [`mesh`]: 1D interval and 2D Cartesian meshes behind a general
//!   cell/face interface, plus regularity parameters.
//! - [`entropy`]: the entropy pair `φ_ρ`, `φ_e`, the perfect-gas equation of
//!   state and the tangent-intersection point `x_KL`.
//! - [`face_values`]: upwind, centered and entropy-limited face values.
//! - [`schemes`]: explicit and implicit mass/internal-energy steppers, CFL
//!   limits and a 1D staggered momentum driver with `q`-Laplacian
//!   stabilization.
//! - [`diagnostics`]: entropy residuals, remainder fields, discrete norms and
//!   the bound report.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod diagnostics;
pub mod entropy;
mod error;
pub mod face_values;
mod linalg;
mod math;
pub mod mesh;
pub mod schemes;

pub use error::{Error, Result};

/// One scalar per cell.
pub type CellField = alloc::vec::Vec<f64>;
/// One scalar per face. For velocities this is the normal component along the
/// face's reference normal (see [`mesh::Face::normal`]).
pub type FaceField = alloc::vec::Vec<f64>;
