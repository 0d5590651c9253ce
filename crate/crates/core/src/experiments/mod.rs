//! Configuration, experiment orchestration and machine-readable output.

pub mod commands;
pub mod config;
pub mod limit;
pub mod output;
pub mod verify;

pub use commands::{
    cmd_continuation, cmd_decay, cmd_limit_study, cmd_pull_in, cmd_simulate, compare_small_aspect, with_jobs,
    ContinuationSummary, DecayCommandReport, EpsComparison, SimulateSummary,
};
pub use config::{InitialCondition, RunConfig};
pub use limit::{limit_study, LimitMember, LimitStudyReport};
pub use verify::{cmd_verify, VerifyCheck, VerifyLevel, VerifyReport};
