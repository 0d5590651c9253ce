//! Trajectory integration with an energy ledger and touchdown monitoring.

use crate::error::{MemsError, Result};
use crate::model::{Model, PlateState};

use super::step::step;

/// One row of the energy ledger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    /// `(1/2) <A_h u, u>_h`
    pub em: f64,
    /// Electrostatic energy of the current gap.
    pub ee: f64,
    /// `(gamma^2 / 2) ||u_t||^2`
    pub kinetic: f64,
    /// Trapezoidal `int_0^t ||u_t||^2 ds`, accumulated every step.
    pub dissipation: f64,
    /// Deviation from the energy equality; zero at `t = 0`.
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    pub rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub min_gap: f64,
    pub sup_u: f64,
    /// `||A_h^{1/2} u||`, the `H^2` surrogate.
    pub norm_h2: f64,
    /// `max g(u)`; NaN on the terminal sample of a touchdown run.
    pub g_sup: f64,
    /// Membership of `u` in `S_alpha(kappa/2)`.
    pub in_s_alpha: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// The gap fell below `kappa_stop` during the step starting at
    /// `t_last` (the last admissible time).
    Touchdown { t_last: f64, min_gap: f64, x: f64 },
    /// `||u||_(1+alpha)` exceeded `2/kappa`; a numerical artefact distinct
    /// from touchdown.
    NormGuard { t_last: f64, norm: f64 },
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Touchdown { .. } => "touchdown",
            Termination::NormGuard { .. } => "norm_guard",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
    /// `(t, u)` snapshots every `snapshot_every` samples.
    pub snapshots: Vec<(f64, Vec<f64>)>,
    /// `(t, u_t)` alongside each snapshot.
    pub velocities: Vec<(f64, Vec<f64>)>,
    pub termination: Termination,
    /// State at the last admissible time.
    pub final_state: PlateState,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub record: TrajectoryRecord,
    pub ledger: EnergyLedger,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Store a `u` snapshot every this many samples; 0 disables snapshots.
    pub snapshot_every: usize,
    /// Store `u_t` alongside each snapshot.
    pub keep_velocities: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            snapshot_every: 1,
            keep_velocities: false,
        }
    }
}

struct Sampler<'a> {
    model: &'a Model,
    reference: f64,
    samples: Vec<TrajectorySample>,
    ledger: Vec<LedgerRow>,
    snapshots: Vec<(f64, Vec<f64>)>,
    velocities: Vec<(f64, Vec<f64>)>,
    options: RunOptions,
    count: usize,
}

impl Sampler<'_> {
    fn record(&mut self, s: &PlateState, dissipation: f64) -> Result<()> {
        let m = self.model;
        let p = &m.params;
        let ev = m.potential.evaluate(&s.u)?;
        let em = m.op.mechanical_energy(&s.u);
        let kinetic = 0.5 * p.gamma * p.gamma * m.grid.inner(&s.v, &s.v);
        let total = em - p.lambda * ev.energy + kinetic + dissipation;
        let adm = m.norms.check_s_alpha(&s.u, 0.5 * p.kappa)?;
        self.samples.push(TrajectorySample {
            t: s.t,
            min_gap: adm.min_gap,
            sup_u: s.u.iter().fold(0.0f64, |a, &v| a.max(v.abs())),
            norm_h2: m.norms.fractional_norm(&s.u, 1.0)?,
            g_sup: ev.g.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            in_s_alpha: adm.member,
        });
        self.ledger.push(LedgerRow {
            t: s.t,
            em,
            ee: ev.energy,
            kinetic,
            dissipation,
            residual: if self.ledger.is_empty() { 0.0 } else { total - self.reference },
        });
        if self.ledger.len() == 1 {
            self.reference = total;
        }
        if self.options.snapshot_every > 0 && self.count.is_multiple_of(self.options.snapshot_every) {
            self.snapshots.push((s.t, s.u.clone()));
            if self.options.keep_velocities {
                self.velocities.push((s.t, s.v.clone()));
            }
        }
        self.count += 1;
        Ok(())
    }
}

/// Integrates from `(u0, u1)` to `t_end` or the first guard trip.
///
/// Samples (trajectory row and ledger row, one potential solve each) are
/// taken every `ledger_stride` steps plus at the final admissible state.
pub fn run_trajectory(
    model: &Model,
    u0: &[f64],
    u1: &[f64],
    options: RunOptions,
) -> Result<Trajectory> {
    let p = &model.params;
    model.grid.check_len(u0, "u0")?;
    model.grid.check_len(u1, "u1")?;
    let adm = model.norms.check_s_alpha(u0, p.kappa)?;
    if !adm.member {
        return Err(MemsError::Admissibility(format!(
            "initial displacement not in S_alpha({}): norm {:.4e} (bound {:.4e}), min gap {:.4e}",
            p.kappa, adm.norm, adm.norm_bound, adm.min_gap
        )));
    }
    let n_steps = (p.t_end / p.dt - 1e-9).ceil() as usize;
    let v0 = if p.gamma > 0.0 {
        u1.to_vec()
    } else {
        vec![0.0; u0.len()]
    };
    let mut state = PlateState::new(u0.to_vec(), v0, 0.0);
    let mut sampler = Sampler {
        model,
        reference: 0.0,
        samples: Vec::new(),
        ledger: Vec::new(),
        snapshots: Vec::new(),
        velocities: Vec::new(),
        options,
        count: 0,
    };
    sampler.record(&state, 0.0)?;
    let mut dissipation = 0.0;
    let mut termination = Termination::Completed;
    let mut warned = false;
    for k in 1..=n_steps {
        if !warned && p.lambda > 0.0 {
            let gap = state.min_gap();
            if p.dt > 0.25 * gap * gap / p.lambda {
                log::warn!(
                    "dt = {} exceeds the heuristic bound 0.25 gap^2 / lambda = {:.3e} at t = {:.4}",
                    p.dt,
                    0.25 * gap * gap / p.lambda,
                    state.t
                );
                warned = true;
            }
        }
        let next = match step(model, &state) {
            Ok(s) => s,
            Err(MemsError::Touchdown { min_gap, x, .. }) => {
                termination = Termination::Touchdown {
                    t_last: state.t,
                    min_gap,
                    x,
                };
                break;
            }
            Err(MemsError::NormGuard { norm, .. }) => {
                termination = Termination::NormGuard {
                    t_last: state.t,
                    norm,
                };
                break;
            }
            Err(e) => return Err(e),
        };
        let vv0 = model.grid.inner(&state.v, &state.v);
        let vv1 = model.grid.inner(&next.v, &next.v);
        dissipation += if p.gamma > 0.0 {
            0.5 * p.dt * (vv0 + vv1)
        } else {
            p.dt * vv1
        };
        state = next;
        if k % p.ledger_stride == 0 || k == n_steps {
            sampler.record(&state, dissipation)?;
        }
    }
    if !matches!(termination, Termination::Completed)
        && sampler.samples.last().map(|s| s.t) != Some(state.t)
    {
        sampler.record(&state, dissipation)?;
    }
    if let Termination::Touchdown { min_gap, .. } = termination {
        // terminal row: the state that crossed the threshold, first-order
        // extrapolated from the last admissible state
        let t_fail = state.t + model.params.dt;
        sampler.samples.push(TrajectorySample {
            t: t_fail,
            min_gap,
            sup_u: f64::NAN,
            norm_h2: f64::NAN,
            g_sup: f64::NAN,
            in_s_alpha: false,
        });
    }
    Ok(Trajectory {
        record: TrajectoryRecord {
            samples: sampler.samples,
            snapshots: sampler.snapshots,
            velocities: sampler.velocities,
            termination,
            final_state: state,
        },
        ledger: EnergyLedger {
            rows: sampler.ledger,
        },
    })
}

/// Touchdown time and location estimated from a terminated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TouchdownEstimate {
    pub t_c: f64,
    pub x: f64,
    /// Length of the extrapolation interval (last two samples).
    pub interval: f64,
}

/// Linear extrapolation of `min(1 + u)` through the last two samples to zero.
pub fn detect_touchdown(record: &TrajectoryRecord) -> Option<TouchdownEstimate> {
    let x = match record.termination {
        Termination::Touchdown { x, .. } => x,
        _ => return None,
    };
    let n = record.samples.len();
    if n < 2 {
        return None;
    }
    let (a, b) = (&record.samples[n - 2], &record.samples[n - 1]);
    let slope = (b.min_gap - a.min_gap) / (b.t - a.t);
    let t_c = if slope < 0.0 {
        b.t - b.min_gap / slope
    } else {
        b.t
    };
    Some(TouchdownEstimate {
        t_c,
        x,
        interval: b.t - a.t,
    })
}
