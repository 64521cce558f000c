//! Runs, refinement studies and self-checks on top of `eulerfv-core`, with
//! a flat configuration format and CSV/JSON outputs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod run;
pub mod selftest;
pub mod study;

pub use config::{InitialData, RunConfig, TimeStep, VelocityKind};
pub use error::{LabError, Result};
pub use run::{run, simulate, BoundReport, RunArtifacts, RunSummary};
pub use selftest::{selftest, SelfCheck};
pub use study::{refinement_study, study, fit_order, LevelRow, Order, StudyTable};
