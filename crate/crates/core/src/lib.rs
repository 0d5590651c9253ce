//! Simulation and analysis of a free-boundary electrostatic MEMS model: an
//! elastic clamped plate obeying a damped fourth-order wave equation,
//! driven by the electrostatic field in the gap below it.
//!
//! The crate covers the plate operator and its spectral norms, the potential
//! solve on the fixed rectangle, time integration with an energy ledger and
//! touchdown monitoring, Lyapunov decay certification, steady-state
//! continuation with fold detection, and an experiment layer that writes
//! CSV and JSON outputs.

pub mod banded;
pub mod decay;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod model;
pub mod norms;
pub mod params;
pub mod plate;
pub mod potential;
pub mod stationary;

pub use error::{MemsError, Result};
pub use grid::{Grid1D, Grid2D};
pub use model::{Model, PlateState};
pub use norms::{AdmissibilityReport, FractionalNormContext};
pub use params::ModelParams;
pub use plate::PlateOperator;
pub use potential::{Electrostatics, PotentialField, PotentialSolver};
