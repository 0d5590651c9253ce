//! Dynamic pull-in threshold by bisection on the touchdown predicate.

use serde::Serialize;

use crate::dynamics::{detect_touchdown, run_trajectory, RunOptions, Termination};
use crate::error::{MemsError, Result};
use crate::model::Model;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullInWitness {
    pub lambda: f64,
    pub termination: String,
    /// Last admissible time.
    pub t_last: f64,
    pub final_min_gap: f64,
    /// Extrapolated touchdown time, if any.
    pub t_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullInResult {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub horizon: f64,
    pub iterations: usize,
    /// Bracket width after each bisection step.
    pub widths: Vec<f64>,
    pub witness_lo: PullInWitness,
    pub witness_hi: PullInWitness,
}

/// Runs `(u0, u1)` at `lambda` up to `horizon`. Any early termination,
/// including the norm guard, counts as failing to complete.
pub fn probe(model: &Model, lambda: f64, u0: &[f64], u1: &[f64], horizon: f64) -> Result<PullInWitness> {
    let mut m = model.with_lambda(lambda);
    m.params.t_end = horizon;
    let opts = RunOptions {
        snapshot_every: 0,
        keep_velocities: false,
    };
    let tr = run_trajectory(&m, u0, u1, opts)?;
    let rec = &tr.record;
    let t_last = rec.final_state.t;
    let final_min_gap = rec.final_state.min_gap();
    let t_c = match rec.termination {
        Termination::Touchdown { .. } => detect_touchdown(rec).map(|e| e.t_c),
        _ => None,
    };
    Ok(PullInWitness {
        lambda,
        termination: rec.termination.label().to_string(),
        t_last,
        final_min_gap,
        t_c,
    })
}

impl PullInWitness {
    pub fn completed(&self) -> bool {
        self.termination == "completed"
    }
}

/// Bisects `[lambda_lo, lambda_hi]` down to width `tol`. `lambda_lo` must
/// complete and `lambda_hi` must not.
pub fn pull_in_bisection(
    model: &Model,
    lambda_lo: f64,
    lambda_hi: f64,
    horizon: f64,
    tol: f64,
    u0: &[f64],
    u1: &[f64],
) -> Result<PullInResult> {
    if !(lambda_lo >= 0.0 && lambda_hi > lambda_lo && lambda_hi.is_finite()) {
        return Err(MemsError::Argument(format!(
            "need 0 <= lambda_lo < lambda_hi, got [{lambda_lo}, {lambda_hi}]"
        )));
    }
    if !(horizon > 0.0 && tol > 0.0) {
        return Err(MemsError::Argument(format!(
            "horizon and tol must be positive, got {horizon}, {tol}"
        )));
    }
    let (lo, hi) = rayon::join(
        || probe(model, lambda_lo, u0, u1, horizon),
        || probe(model, lambda_hi, u0, u1, horizon),
    );
    let (mut wlo, mut whi) = (lo?, hi?);
    if !wlo.completed() {
        return Err(MemsError::Argument(format!(
            "lambda_lo = {lambda_lo} does not complete the horizon ({})",
            wlo.termination
        )));
    }
    if whi.completed() {
        return Err(MemsError::Argument(format!(
            "lambda_hi = {lambda_hi} completes the horizon without touchdown"
        )));
    }
    let mut widths = Vec::new();
    while whi.lambda - wlo.lambda > tol {
        let mid = 0.5 * (wlo.lambda + whi.lambda);
        let w = probe(model, mid, u0, u1, horizon)?;
        if w.completed() {
            wlo = w;
        } else {
            whi = w;
        }
        widths.push(whi.lambda - wlo.lambda);
    }
    Ok(PullInResult {
        lambda_lo: wlo.lambda,
        lambda_hi: whi.lambda,
        horizon,
        iterations: widths.len(),
        widths,
        witness_lo: wlo,
        witness_hi: whi,
    })
}
