//! Steady states `A_h U = -lambda g(U)`: Newton, continuation through the
//! fold, and the dynamic pull-in threshold.

pub mod continuation;
pub mod newton;
pub mod pull_in;

pub use continuation::{
    branch_csv, continue_branch, fold_estimate, parse_branch_csv, steady_sweep, Branch, BranchRow,
    BranchTermination, ContinuationOptions, FoldEstimate,
};
pub use newton::{newton_steady, residual_floor, spectral_stability, steady_jacobian, steady_residual, BranchPoint, Stability};
pub use pull_in::{probe, pull_in_bisection, PullInResult, PullInWitness};
