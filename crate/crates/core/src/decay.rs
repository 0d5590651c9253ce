//! Lyapunov certification of exponential energy decay.
//!
//! Along a trajectory the shifted variable `v = u - u0` solves
//! `gamma^2 v'' + v' + A v = f` with `f = -lambda g(u) - A u0`. With the
//! spectral norms of [`crate::norms`] the functionals are
//!
//! ```text
//! E = ||v||_(1+alpha)^2 + gamma^2 ||v'||_(alpha)^2
//! F = gamma <v, v'>_(alpha)
//! G = E + b gamma F
//! ```
//!
//! and `E(t) <= (b/omega) e^{-omega t} E(0)
//!           + (b+2)/(b omega) (1 - e^{-omega t}) sup_{s<=t} ||f(s)||_(alpha)^2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::TrajectoryRecord;
use crate::error::{MemsError, Result};
use crate::model::Model;
use crate::norms::FractionalNormContext;
use crate::potential::lipschitz::random_admissible;

/// Decay constants for a given `gamma1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovConfig {
    pub gamma1: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub b: f64,
    pub omega: f64,
}

impl LyapunovConfig {
    /// Constants under the spectral calibration `c0 = c1 = c2 = 1`.
    pub fn new(gamma1: f64) -> Result<Self> {
        Self::with_c1(gamma1, 1.0)
    }

    pub fn with_c1(gamma1: f64, c1: f64) -> Result<Self> {
        if !(gamma1 > 0.0) || !gamma1.is_finite() {
            return Err(MemsError::Parameter(format!("gamma1 must be > 0, got {gamma1}")));
        }
        if !(c1 >= 1.0) || !c1.is_finite() {
            return Err(MemsError::Parameter(format!("c1 must be >= 1, got {c1}")));
        }
        let b = (2.0 / (2.0 * gamma1 * gamma1 + c1 + 1.0))
            .min(1.0 / (2.0 * c1))
            .min(1.0 / (gamma1 * c1));
        let omega = b / (2.0 + c1 * b * gamma1);
        Ok(Self {
            gamma1,
            c0: 1.0,
            c1,
            c2: c1,
            b,
            omega,
        })
    }

    /// Upper sandwich factor `1 + c1 b gamma1 / 2`.
    pub fn upper_factor(&self) -> f64 {
        1.0 + 0.5 * self.c1 * self.b * self.gamma1
    }

    /// Grönwall envelope for `E(t)`.
    pub fn envelope(&self, t: f64, e0: f64, sup_f2: f64) -> f64 {
        let decay = (-self.omega * t).exp();
        self.b / self.omega * decay * e0
            + (self.b + 2.0) / (self.b * self.omega) * (1.0 - decay) * sup_f2
    }
}

pub fn decay_constants(gamma1: f64) -> Result<LyapunovConfig> {
    LyapunovConfig::new(gamma1)
}

/// Smallest `c1 >= 1` with `||z||_(alpha)^2 <= c1 ||A^{1/2} z||_(alpha)^2`,
/// i.e. `max(1, 1/mu_1)`.
pub fn calibrated_c1(ctx: &FractionalNormContext) -> f64 {
    (1.0 / ctx.mu1()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecaySample {
    pub t: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// `||f(t)||_(alpha)`
    pub forcing_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SandwichKind {
    /// `|F| <= (c1/2) E`
    CrossTerm,
    /// `E/2 <= G`
    Lower,
    /// `G <= (1 + c1 b gamma1 / 2) E`
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichViolation {
    pub t: f64,
    pub kind: SandwichKind,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTrace {
    pub gamma: f64,
    pub samples: Vec<DecaySample>,
    pub violations: Vec<SandwichViolation>,
}

/// Relative tolerance of the pointwise sandwich checks.
pub const SANDWICH_RTOL: f64 = 1e-12;

/// Builds `E`, `F`, `G` and `||f||` from the snapshots of a trajectory run
/// with `snapshot_every = 1` and `keep_velocities = true`.
pub fn evaluate_decay_trace(
    record: &TrajectoryRecord,
    u0: &[f64],
    config: &LyapunovConfig,
    model: &Model,
) -> Result<DecayTrace> {
    let ctx = &model.norms;
    let p = &model.params;
    let n = model.n();
    if u0.len() != n {
        return Err(MemsError::Argument(format!(
            "u0 has {} nodes, model grid has {n}",
            u0.len()
        )));
    }
    if record.snapshots.len() != record.velocities.len() {
        return Err(MemsError::Argument(
            "decay trace needs velocity snapshots alongside displacements".into(),
        ));
    }
    if p.gamma > config.gamma1 {
        return Err(MemsError::Argument(format!(
            "gamma = {} exceeds gamma1 = {}",
            p.gamma, config.gamma1
        )));
    }
    let alpha = ctx.alpha();
    let gamma = p.gamma;
    let au0 = model.op.apply(u0);
    let mut samples = Vec::with_capacity(record.snapshots.len());
    let mut violations = Vec::new();
    for ((t, u), (_, ut)) in record.snapshots.iter().zip(&record.velocities) {
        if u.len() != n || ut.len() != n {
            return Err(MemsError::Argument(format!(
                "snapshot at t = {t} does not match the model grid"
            )));
        }
        let v: Vec<f64> = u.iter().zip(u0).map(|(a, b)| a - b).collect();
        let e = ctx.fractional_norm(&v, 1.0 + alpha)?.powi(2)
            + gamma * gamma * ctx.fractional_norm(ut, alpha)?.powi(2);
        let f = gamma * ctx.inner(&v, ut, alpha)?;
        let g = e + config.b * gamma * f;
        let mut forcing: Vec<f64> = au0.iter().map(|a| -a).collect();
        if p.lambda != 0.0 {
            let gu = model.potential.g(u)?;
            forcing.iter_mut().zip(&gu).for_each(|(fi, gi)| *fi -= p.lambda * gi);
        }
        let forcing_norm = ctx.fractional_norm(&forcing, alpha)?;
        let slack = SANDWICH_RTOL * e.abs() + f64::MIN_POSITIVE;
        let checks = [
            (SandwichKind::CrossTerm, f.abs() - 0.5 * config.c1 * e),
            (SandwichKind::Lower, 0.5 * e - g),
            (SandwichKind::Upper, g - config.upper_factor() * e),
        ];
        for (kind, excess) in checks {
            if excess > slack {
                violations.push(SandwichViolation { t: *t, kind, excess });
            }
        }
        samples.push(DecaySample {
            t: *t,
            e,
            f,
            g,
            forcing_norm,
        });
    }
    Ok(DecayTrace {
        gamma,
        samples,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub b: f64,
    pub omega: f64,
    /// `min_t (envelope(t) - E(t))`.
    pub min_margin: f64,
    pub t_min_margin: f64,
    pub failures: Vec<f64>,
    pub passed: bool,
    /// Least-squares decay rate of `E`, reported when `f = 0` throughout.
    pub fitted_rate: Option<f64>,
    pub homogeneous: bool,
    /// Largest relative increase of `G` between consecutive samples.
    pub max_g_increase: f64,
}

/// Tolerance on the envelope check, relative to `E(0)`.
pub const ENVELOPE_RTOL: f64 = 1e-8;

/// Checks the integrated decay estimate at every sample.
pub fn verify_decay_inequality(trace: &DecayTrace, config: &LyapunovConfig) -> DecayReport {
    let e0 = trace.samples.first().map(|s| s.e).unwrap_or(0.0);
    let mut sup_f2: f64 = 0.0;
    let mut min_margin = f64::INFINITY;
    let mut t_min = 0.0;
    let mut failures = Vec::new();
    let tol = ENVELOPE_RTOL * e0;
    for s in &trace.samples {
        sup_f2 = sup_f2.max(s.forcing_norm * s.forcing_norm);
        let margin = config.envelope(s.t, e0, sup_f2) - s.e;
        if margin < min_margin {
            min_margin = margin;
            t_min = s.t;
        }
        if margin < -tol {
            failures.push(s.t);
        }
    }
    let homogeneous = trace.samples.iter().all(|s| s.forcing_norm == 0.0);
    let fitted_rate = if homogeneous { fit_rate(&trace.samples, e0) } else { None };
    let max_g_increase = trace
        .samples
        .windows(2)
        .map(|w| (w[1].g - w[0].g) / e0.max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    DecayReport {
        b: config.b,
        omega: config.omega,
        min_margin,
        t_min_margin: t_min,
        passed: failures.is_empty(),
        failures,
        fitted_rate,
        homogeneous,
        max_g_increase,
    }
}

/// `-slope` of the least-squares line through `ln E(t)` over samples with
/// `E > 1e-20 E(0)`.
pub fn fit_rate(samples: &[DecaySample], e0: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.e > 1e-20 * e0 && s.e > 0.0)
        .map(|s| (s.t, s.e.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// Concrete stand-ins for the non-constructive constants of the
/// minimal-existence-time estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surrogates {
    pub m: f64,
    pub c3: f64,
    pub c4: f64,
    pub provenance: Vec<String>,
}

impl Surrogates {
    /// `M = 2 max(b/omega, (b+2)/(b omega))`; `c4` the exact discrete
    /// embedding constant of `||.||_(1+alpha)` into the max norm (at least
    /// 1); `c3` the largest sampled `||g(w)||_(alpha)` over `samples` random
    /// smooth `w` in `S_alpha(kappa/2)`.
    pub fn estimate(model: &Model, config: &LyapunovConfig, samples: usize, seed: u64) -> Result<Self> {
        let ctx = &model.norms;
        let m = 2.0 * (config.b / config.omega).max((config.b + 2.0) / (config.b * config.omega));
        let c4 = embedding_constant(ctx).max(1.0);
        let half = 0.5 * model.params.kappa;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c3: f64 = 0.0;
        for _ in 0..samples {
            let w = random_admissible(ctx, half, 8, &mut rng)?;
            let g = model.potential.g(&w)?;
            c3 = c3.max(ctx.fractional_norm(&g, ctx.alpha())?);
        }
        Ok(Self {
            m,
            c3,
            c4,
            provenance: vec![
                "M: 2 * max(b/omega, (b+2)/(b*omega)) from the Gronwall constants".into(),
                "c4: max_x sqrt(sum_k e_k(x)^2 / mu_k^(1+alpha)), clamped to >= 1".into(),
                format!(
                    "c3: max ||g(w)||_(alpha) over {samples} random smooth samples of S_alpha(kappa/2), seed {seed}; a lower bound of the supremum"
                ),
            ],
        })
    }
}

/// `sup { ||z||_inf : ||z||_(1+alpha) = 1 }` on the grid, exact by
/// Cauchy-Schwarz in the eigenbasis.
pub fn embedding_constant(ctx: &FractionalNormContext) -> f64 {
    let n = ctx.grid().n_interior();
    let p = 1.0 + ctx.alpha();
    let mut acc = vec![0.0; n];
    for (k, mu) in ctx.eigenvalues().iter().enumerate() {
        let e = ctx.eigenvector(k);
        let w = mu.powf(-p);
        for (a, v) in acc.iter_mut().zip(&e) {
            *a += v * v * w;
        }
    }
    acc.into_iter().fold(0.0, f64::max).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallnessReport {
    /// `kappa^2 / (8 M c4^2)`
    pub threshold: f64,
    /// `gamma^2 ||u1||_(alpha)^2`
    pub gamma_lhs: f64,
    pub gamma_condition: bool,
    /// `lambda^2 c3^2 + ||u0||_(2+alpha)^2`
    pub bracket: f64,
    /// Surrogate minimal existence time; infinite on the global branch.
    pub t_hat: f64,
    pub global_condition: bool,
    pub surrogates: Surrogates,
}

/// Evaluates the two smallness conditions and the surrogate `T_hat`.
pub fn smallness_conditions(
    u0: &[f64],
    u1: &[f64],
    model: &Model,
    config: &LyapunovConfig,
    surrogates: &Surrogates,
) -> Result<SmallnessReport> {
    if !(surrogates.m > 0.0 && surrogates.c3 > 0.0 && surrogates.c4 > 0.0) {
        return Err(MemsError::Parameter(format!(
            "surrogate constants must be positive: M = {}, c3 = {}, c4 = {}",
            surrogates.m, surrogates.c3, surrogates.c4
        )));
    }
    let ctx = &model.norms;
    let p = &model.params;
    let alpha = ctx.alpha();
    let threshold = p.kappa * p.kappa / (8.0 * surrogates.m * surrogates.c4 * surrogates.c4);
    let gamma_lhs = p.gamma * p.gamma * ctx.fractional_norm(u1, alpha)?.powi(2);
    let bracket = p.lambda * p.lambda * surrogates.c3 * surrogates.c3
        + ctx.fractional_norm(u0, 2.0 + alpha)?.powi(2);
    let t_hat = minimal_existence_time(bracket, threshold, config.omega);
    Ok(SmallnessReport {
        threshold,
        gamma_lhs,
        gamma_condition: gamma_lhs < threshold,
        bracket,
        t_hat,
        global_condition: bracket < threshold,
        surrogates: surrogates.clone(),
    })
}

/// Largest `t` with `bracket (1 - e^{-omega t}) < threshold`.
pub fn minimal_existence_time(bracket: f64, threshold: f64, omega: f64) -> f64 {
    if bracket <= threshold {
        f64::INFINITY
    } else {
        -(-threshold / bracket).ln_1p() / omega
    }
}
