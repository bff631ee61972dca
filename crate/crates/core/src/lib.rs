//! Rotating-field qubit gates that can be tuned continuously from dynamic to
//! purely geometric, and Monte Carlo estimates of their fidelity when the
//! control fields fluctuate.
//!
//! Layering, bottom up: [`qmath`] (fixed-size complex algebra), [`model`]
//! (closed-form phases and parameter solvers), [`evolve`] (propagators and
//! ideal gates), [`noise`] (seeded sampling), [`fidelity`] (estimators),
//! [`sweep`] (parameter scans), [`cli`] (config files and CSV output).

pub mod cli;
pub mod error;
pub mod evolve;
pub mod exec;
pub mod fidelity;
pub mod model;
pub mod noise;
pub mod qmath;
pub mod sweep;

pub use error::{Error, Result};
pub use exec::Executor;
pub use fidelity::{ControlMode, EstimatorConfig, FidelityEstimate};
pub use model::{Branch, DriveParams, PhaseTriple, TwoQubitParams};
pub use noise::{InputMeasure, NoiseSpec, RngStream};
