//! Time integration of the plate equation.

pub mod step;
pub mod trajectory;

pub use step::{check_guards, step, step_parabolic, step_wave};
pub use trajectory::{
    detect_touchdown, run_trajectory, EnergyLedger, LedgerRow, RunOptions, TouchdownEstimate,
    Termination, Trajectory, TrajectoryRecord, TrajectorySample,
};
