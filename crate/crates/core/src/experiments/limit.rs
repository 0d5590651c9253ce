//! Damping-dominated limit: trajectories for decreasing `gamma` against the
//! parabolic (`gamma = 0`) reference.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{run_trajectory, RunOptions, Termination, TrajectoryRecord};
use crate::error::{MemsError, Result};
use crate::model::Model;
use crate::potential::{discrete_h2_norm, sample_lipschitz};

/// Slack on the sampled Lipschitz constant in the potential check.
pub const LIPSCHITZ_SLACK: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitMember {
    pub gamma: f64,
    /// `max_t ||u_gamma - u_0||_(1)`
    pub err: f64,
    /// `max_t ||phi(u_gamma) - phi(u_0)||_{h,2}`
    pub potential_err: f64,
    /// `max_t ||phi(u_gamma) - phi(u_0)||_{h,2} / ||u_gamma - u_0||_(1+alpha)`
    pub lipschitz_ratio: f64,
    /// `(int_0^T ||d_t u_gamma - d_t u_0||_(alpha)^2 dt)^(1/2)` for zero data.
    pub velocity_err: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitStudyReport {
    pub gammas: Vec<f64>,
    pub horizon: f64,
    pub lambda: f64,
    pub zero_data: bool,
    pub members: Vec<LimitMember>,
    /// `log(err_i / err_{i+1}) / log(gamma_i / gamma_{i+1})`
    pub err_orders: Vec<f64>,
    pub potential_orders: Vec<f64>,
    pub velocity_orders: Vec<f64>,
    /// Sampled Lipschitz constant of `u -> phi_u`.
    pub lipschitz_c0: f64,
    pub lipschitz_ok: bool,
    pub err_strictly_decreasing: bool,
    pub velocity_strictly_decreasing: Option<bool>,
}

fn orders(gammas: &[f64], vals: &[f64]) -> Vec<f64> {
    gammas
        .windows(2)
        .zip(vals.windows(2))
        .map(|(g, v)| (v[0] / v[1]).ln() / (g[0] / g[1]).ln())
        .collect()
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn member_run(model: &Model, gamma: f64, u0: &[f64], u1: &[f64]) -> Result<TrajectoryRecord> {
    let m = model.with_gamma(gamma);
    let tr = run_trajectory(
        &m,
        u0,
        u1,
        RunOptions {
            snapshot_every: 1,
            keep_velocities: true,
        },
    )?;
    if tr.record.termination != Termination::Completed {
        return Err(MemsError::Numerical(format!(
            "limit study member gamma = {gamma} terminated early ({}) at t = {}",
            tr.record.termination.label(),
            tr.record.final_state.t
        )));
    }
    Ok(tr.record)
}

/// Runs every `gamma` in `gammas` and the parabolic reference on the same
/// grid, time step, horizon (`model.params.t_end`) and data. Members run in
/// parallel on the current rayon pool; results are ordered as `gammas`.
pub fn limit_study(
    model: &Model,
    gammas: &[f64],
    u0: &[f64],
    u1: &[f64],
    lipschitz_samples: usize,
    seed: u64,
) -> Result<LimitStudyReport> {
    if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0)) || gammas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(MemsError::Argument(format!(
            "gamma list must be positive and strictly descending: {gammas:?}"
        )));
    }
    let p = &model.params;
    let zero_data = u0.iter().chain(u1).all(|&v| v == 0.0);
    let mut all: Vec<f64> = gammas.to_vec();
    all.push(0.0);
    let records: Vec<TrajectoryRecord> = all
        .par_iter()
        .map(|&g| member_run(model, g, u0, u1))
        .collect::<Result<_>>()?;
    let (reference, members) = records.split_last().unwrap();
    let ref_phi: Vec<Vec<f64>> = reference
        .snapshots
        .par_iter()
        .map(|(_, u)| Ok(model.potential.solve(u)?.values().to_vec()))
        .collect::<Result<_>>()?;
    let (c0, _) = sample_lipschitz(&model.potential, &model.norms, p.kappa, lipschitz_samples, seed)?;
    let ctx = &model.norms;
    let alpha = ctx.alpha();
    let dt_sample = p.dt * p.ledger_stride as f64;
    let results: Vec<LimitMember> = members
        .par_iter()
        .zip(gammas)
        .map(|(rec, &gamma)| {
            if rec.snapshots.len() != reference.snapshots.len() {
                return Err(MemsError::Numerical(format!(
                    "gamma = {gamma}: {} snapshots against {} in the reference",
                    rec.snapshots.len(),
                    reference.snapshots.len()
                )));
            }
            let (mut err, mut perr, mut ratio, mut vsq) = (0.0f64, 0.0f64, 0.0f64, 0.0);
            for (k, ((_, u), (_, ur))) in rec.snapshots.iter().zip(&reference.snapshots).enumerate() {
                let du: Vec<f64> = u.iter().zip(ur).map(|(a, b)| a - b).collect();
                err = err.max(ctx.fractional_norm(&du, 1.0)?);
                let phi = model.potential.solve(u)?;
                let dphi: Vec<f64> = phi.values().iter().zip(&ref_phi[k]).map(|(a, b)| a - b).collect();
                let pe = discrete_h2_norm(&model.potential.grid, &dphi);
                perr = perr.max(pe);
                let dist = ctx.fractional_norm(&du, 1.0 + alpha)?;
                if dist > 0.0 {
                    ratio = ratio.max(pe / dist);
                }
                if zero_data && k > 0 {
                    let dv: Vec<f64> = rec.velocities[k]
                        .1
                        .iter()
                        .zip(&reference.velocities[k].1)
                        .map(|(a, b)| a - b)
                        .collect();
                    vsq += dt_sample * ctx.fractional_norm(&dv, alpha)?.powi(2);
                }
            }
            Ok(LimitMember {
                gamma,
                err,
                potential_err: perr,
                lipschitz_ratio: ratio,
                velocity_err: (zero_data && p.lambda > 0.0).then(|| vsq.sqrt()),
                samples: rec.snapshots.len(),
            })
        })
        .collect::<Result<_>>()?;
    let errs: Vec<f64> = results.iter().map(|m| m.err).collect();
    let perrs: Vec<f64> = results.iter().map(|m| m.potential_err).collect();
    let verrs: Vec<f64> = results.iter().filter_map(|m| m.velocity_err).collect();
    let has_velocity = verrs.len() == results.len();
    Ok(LimitStudyReport {
        gammas: gammas.to_vec(),
        horizon: p.t_end,
        lambda: p.lambda,
        zero_data,
        err_orders: orders(gammas, &errs),
        potential_orders: orders(gammas, &perrs),
        velocity_orders: if has_velocity { orders(gammas, &verrs) } else { vec![] },
        lipschitz_c0: c0,
        lipschitz_ok: results.iter().all(|m| m.lipschitz_ratio <= LIPSCHITZ_SLACK * c0),
        err_strictly_decreasing: strictly_decreasing(&errs),
        velocity_strictly_decreasing: has_velocity.then(|| strictly_decreasing(&verrs)),
        members: results,
    })
}
