//! The experiment commands behind the `mems` binary. Each one writes its
//! files into `out` and returns the structured report.

use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::decay::{
    decay_constants, evaluate_decay_trace, smallness_conditions, verify_decay_inequality, SmallnessReport,
    Surrogates,
};
use crate::dynamics::{detect_touchdown, run_trajectory, RunOptions, Termination};
use crate::error::{MemsError, Result};
use crate::model::Model;
use crate::stationary::{
    branch_csv, continue_branch, pull_in_bisection, steady_sweep, Branch, ContinuationOptions, PullInResult,
    Stability,
};

use super::config::RunConfig;
use super::limit::{limit_study, LimitStudyReport};
use super::output::{
    csv, fmt, json_f64, write_file, write_json, LEDGER_COLUMNS, SCHEMA_VERSION, TRAJECTORY_COLUMNS,
};

/// Runs `f` on a dedicated pool of `jobs` threads (all cores when 0).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| MemsError::Argument(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn initial_data(cfg: &RunConfig, model: &Model) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        cfg.initial_condition.realise(&model.grid, &model.norms)?,
        cfg.initial_velocity.realise(&model.grid, &model.norms)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateSummary {
    pub termination: String,
    pub t_last: f64,
    pub t_c: Option<f64>,
    pub touchdown_x: Option<f64>,
    pub samples: usize,
    pub ledger_rows: usize,
    pub max_abs_residual: f64,
    pub final_min_gap: f64,
}

/// `trajectory.csv`, `ledger.csv` and `summary.json`.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<SimulateSummary> {
    let model = Model::new(cfg.params.clone())?;
    let (u0, u1) = initial_data(cfg, &model)?;
    let tr = run_trajectory(
        &model,
        &u0,
        &u1,
        RunOptions {
            snapshot_every: 0,
            keep_velocities: false,
        },
    )?;
    let rec = &tr.record;
    let traj = csv(
        &TRAJECTORY_COLUMNS,
        rec.samples.iter().map(|s| {
            vec![
                fmt(s.t),
                fmt(s.min_gap),
                fmt(s.sup_u),
                fmt(s.norm_h2),
                fmt(s.g_sup),
                s.in_s_alpha.to_string(),
            ]
        }),
    );
    let ledger = csv(
        &LEDGER_COLUMNS,
        tr.ledger.rows.iter().map(|r| {
            vec![
                fmt(r.t),
                fmt(r.em),
                fmt(r.ee),
                fmt(r.kinetic),
                fmt(r.dissipation),
                fmt(r.residual),
            ]
        }),
    );
    write_file(out, "trajectory.csv", &traj)?;
    write_file(out, "ledger.csv", &ledger)?;
    let td = detect_touchdown(rec);
    let summary = SimulateSummary {
        termination: rec.termination.label().into(),
        t_last: rec.final_state.t,
        t_c: td.map(|e| e.t_c),
        touchdown_x: td.map(|e| e.x),
        samples: rec.samples.len(),
        ledger_rows: tr.ledger.rows.len(),
        max_abs_residual: tr.ledger.max_abs_residual(),
        final_min_gap: rec.final_state.min_gap(),
    };
    let extra = match rec.termination {
        Termination::NormGuard { norm, .. } => json!({ "guard_norm": norm }),
        _ => json!({}),
    };
    write_json(
        out,
        "summary.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "columns": {
                "trajectory.csv": TRAJECTORY_COLUMNS,
                "ledger.csv": LEDGER_COLUMNS,
            },
            "params": cfg.params,
            "summary": summary,
            "detail": extra,
        }),
    )?;
    Ok(summary)
}

/// `limit_study.csv` and `limit_study.json`.
pub fn cmd_limit_study(cfg: &RunConfig, out: &Path) -> Result<LimitStudyReport> {
    let model = Model::new(cfg.params.clone())?;
    let (u0, u1) = initial_data(cfg, &model)?;
    let report = limit_study(&model, &cfg.gamma_list, &u0, &u1, cfg.lipschitz_samples, cfg.seed)?;
    let header = ["gamma", "err", "potential_err", "lipschitz_ratio", "velocity_err"];
    let table = csv(
        &header,
        report.members.iter().map(|m| {
            vec![
                fmt(m.gamma),
                fmt(m.err),
                fmt(m.potential_err),
                fmt(m.lipschitz_ratio),
                m.velocity_err.map(fmt).unwrap_or_default(),
            ]
        }),
    );
    write_file(out, "limit_study.csv", &table)?;
    write_json(
        out,
        "limit_study.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "limit-study",
            "columns": { "limit_study.csv": header },
            "params": cfg.params,
            "report": report,
        }),
    )?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsComparison {
    pub eps: f64,
    pub lambdas: Vec<f64>,
    pub min_gap_full: Vec<f64>,
    pub min_gap_small_aspect: Vec<f64>,
    pub max_diff: f64,
}

/// Steady min-gaps of the full model at `eps` against the closed-form
/// small-aspect-ratio forcing at the same voltages.
pub fn compare_small_aspect(model: &Model, eps: f64, lambdas: &[f64]) -> Result<EpsComparison> {
    let mut params = model.params.clone();
    params.eps = eps;
    let full = Model::new(params)?;
    let small = full.clone().with_small_aspect();
    let (a, b) = rayon::join(|| steady_sweep(&full, lambdas), || steady_sweep(&small, lambdas));
    let (a, b) = (a?, b?);
    let gf: Vec<f64> = a.iter().map(|p| p.min_gap).collect();
    let gs: Vec<f64> = b.iter().map(|p| p.min_gap).collect();
    Ok(EpsComparison {
        eps,
        lambdas: a.iter().map(|p| p.lambda).collect(),
        max_diff: gf.iter().zip(&gs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        min_gap_full: gf,
        min_gap_small_aspect: gs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuationSummary {
    pub points: usize,
    /// Largest computed voltage on the branch.
    pub lambda_s_h: f64,
    pub lambda_fold_refined: Option<f64>,
    pub fold_turned: bool,
    pub stability_flip: bool,
    pub termination: String,
    pub eps_comparison: Option<EpsComparison>,
    pub pull_in: Option<PullInResult>,
}

pub fn continuation_options(cfg: &RunConfig) -> ContinuationOptions {
    ContinuationOptions {
        lambda_start: cfg.lambda_start,
        step: cfg.lambda_step,
        max_step: cfg.lambda_max_step,
        arclength: cfg.arclength,
        max_points: cfg.max_points,
        min_gap_stop: cfg.min_gap_stop,
        ..Default::default()
    }
}

/// True when the branch has a stable point followed later by an unstable one.
pub fn stability_flip(branch: &Branch) -> bool {
    let first_stable = branch.points.iter().position(|p| p.stability == Stability::Stable);
    first_stable.is_some_and(|i| branch.points[i..].iter().any(|p| p.stability == Stability::Unstable))
}

/// `branch.csv` and `fold.json`; the optional small-aspect comparison and
/// pull-in bracket are embedded in the JSON summary.
pub fn cmd_continuation(cfg: &RunConfig, out: &Path) -> Result<(Branch, ContinuationSummary)> {
    let model = Model::new(cfg.params.clone())?;
    let branch = continue_branch(&model, &continuation_options(cfg))?;
    write_file(out, "branch.csv", &branch_csv(&branch))?;
    let eps_comparison = if cfg.eps_compare {
        Some(compare_small_aspect(&model, cfg.compare_eps, &cfg.compare_lambdas)?)
    } else {
        None
    };
    let pull_in = if cfg.pull_in {
        let (u0, u1) = initial_data(cfg, &model)?;
        Some(pull_in_bisection(
            &model,
            cfg.lambda_lo,
            cfg.lambda_hi,
            cfg.horizon,
            cfg.bisection_tol,
            &u0,
            &u1,
        )?)
    } else {
        None
    };
    let summary = ContinuationSummary {
        points: branch.points.len(),
        lambda_s_h: branch.lambda_max(),
        lambda_fold_refined: branch.fold.map(|f| f.lambda_refined),
        fold_turned: branch.fold.is_some_and(|f| f.turned),
        stability_flip: stability_flip(&branch),
        termination: serde_json::to_value(branch.termination)
            .ok()
            .and_then(|v| v.get("kind").and_then(|k| k.as_str().map(str::to_string)))
            .unwrap_or_default(),
        eps_comparison,
        pull_in,
    };
    write_json(
        out,
        "fold.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "continuation",
            "columns": { "branch.csv": ["s", "lambda", "min_gap", "sup_norm", "stability", "residual"] },
            "params": cfg.params,
            "fold": branch.fold,
            "branch_termination": branch.termination,
            "summary": summary,
        }),
    )?;
    Ok((branch, summary))
}

/// `pull_in.json`.
pub fn cmd_pull_in(cfg: &RunConfig, out: &Path) -> Result<PullInResult> {
    let model = Model::new(cfg.params.clone())?;
    let (u0, u1) = initial_data(cfg, &model)?;
    let res = pull_in_bisection(
        &model,
        cfg.lambda_lo,
        cfg.lambda_hi,
        cfg.horizon,
        cfg.bisection_tol,
        &u0,
        &u1,
    )?;
    write_json(
        out,
        "pull_in.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "pull-in",
            "params": cfg.params,
            "result": res,
        }),
    )?;
    Ok(res)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCommandReport {
    pub gamma: f64,
    pub gamma1: f64,
    pub b: f64,
    pub omega: f64,
    pub homogeneous: bool,
    pub fitted_rate: Option<f64>,
    pub rate_at_least_omega: Option<bool>,
    pub min_margin: f64,
    pub envelope_passed: bool,
    pub sandwich_violations: usize,
    pub max_g_increase: f64,
    pub smallness: Option<SmallnessReport>,
    pub passed: bool,
}

/// `decay_trace.csv` and `decay.json`.
pub fn cmd_decay(cfg: &RunConfig, out: &Path) -> Result<DecayCommandReport> {
    let p = &cfg.params;
    if !(p.gamma > 0.0 && p.gamma <= p.gamma1) {
        return Err(MemsError::Argument(format!(
            "decay needs 0 < gamma <= gamma1, got gamma = {}, gamma1 = {}",
            p.gamma, p.gamma1
        )));
    }
    let model = Model::new(p.clone())?;
    let (u0, u1) = initial_data(cfg, &model)?;
    let config = decay_constants(p.gamma1)?;
    let tr = run_trajectory(
        &model,
        &u0,
        &u1,
        RunOptions {
            snapshot_every: 1,
            keep_velocities: true,
        },
    )?;
    let trace = evaluate_decay_trace(&tr.record, &u0, &config, &model)?;
    let rep = verify_decay_inequality(&trace, &config);
    let smallness = if p.lambda > 0.0 {
        let s = Surrogates::estimate(&model, &config, cfg.c3_samples, cfg.seed)?;
        Some(smallness_conditions(&u0, &u1, &model, &config, &s)?)
    } else {
        None
    };
    let header = ["t", "E", "F", "G", "f_norm"];
    write_file(
        out,
        "decay_trace.csv",
        &csv(
            &header,
            trace
                .samples
                .iter()
                .map(|s| vec![fmt(s.t), fmt(s.e), fmt(s.f), fmt(s.g), fmt(s.forcing_norm)]),
        ),
    )?;
    let rate_ok = rep.fitted_rate.map(|r| r >= config.omega);
    let report = DecayCommandReport {
        gamma: p.gamma,
        gamma1: p.gamma1,
        b: config.b,
        omega: config.omega,
        homogeneous: rep.homogeneous,
        fitted_rate: rep.fitted_rate,
        rate_at_least_omega: rate_ok,
        min_margin: rep.min_margin,
        envelope_passed: rep.passed,
        sandwich_violations: trace.violations.len(),
        max_g_increase: rep.max_g_increase,
        smallness,
        passed: rep.passed && trace.violations.is_empty() && rate_ok != Some(false),
    };
    write_json(
        out,
        "decay.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "decay",
            "columns": { "decay_trace.csv": header },
            "params": cfg.params,
            "t_hat": report.smallness.as_ref().map(|s| json_f64(s.t_hat)),
            "report": report,
            "termination": tr.record.termination.label(),
        }),
    )?;
    Ok(report)
}
