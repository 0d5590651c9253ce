//! Self-check suite: closed forms, trivial identities and, at the full
//! level, convergence sweeps and ODE oracles.

use serde::Serialize;

use crate::decay::{decay_constants, evaluate_decay_trace, minimal_existence_time, verify_decay_inequality};
use crate::dynamics::{run_trajectory, step_parabolic, RunOptions, Termination};
use crate::error::{MemsError, Result};
use crate::grid::{Grid1D, Grid2D};
use crate::model::{Model, PlateState};
use crate::params::ModelParams;
use crate::potential::{
    gradient_trace, small_aspect_trace, solve_potential, GapProfile, ManufacturedCase,
};
use crate::stationary::newton_steady;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl std::str::FromStr for VerifyLevel {
    type Err = MemsError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            _ => Err(MemsError::Argument(format!("level must be quick or full, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

type Check = fn() -> Result<(bool, String)>;

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fixed(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

fn small_params() -> ModelParams {
    ModelParams {
        nx: 31,
        neta: 15,
        ..Default::default()
    }
}

fn flat_plate_exact() -> Result<(bool, String)> {
    let grid = Grid2D::new(Grid1D::new(31)?, 15)?;
    let profile = GapProfile::from_plate(&grid.x, &[0.0; 31])?;
    let mut worst: f64 = 0.0;
    for eps in [0.0, 0.1, 0.5, 1.0] {
        let f = solve_potential(&grid, &profile, eps, 0.01, 1e-10)?;
        let (nx2, m2) = grid.full_shape();
        for i in 0..nx2 {
            for j in 0..m2 {
                worst = worst.max((f.get(i, j) - grid.eta(j)).abs());
            }
        }
    }
    Ok((worst <= 1e-10, format!("max |phi - eta| = {worst:.3e}")))
}

fn small_aspect_closed_form() -> Result<(bool, String)> {
    let grid = Grid2D::new(Grid1D::new(31)?, 15)?;
    let mut worst: f64 = 0.0;
    for a in [0.1, 0.3, 0.6] {
        let u = grid.x.sample(|x| -a * (1.0 - x * x).powi(2));
        let profile = GapProfile::from_plate(&grid.x, &u)?;
        let f = solve_potential(&grid, &profile, 0.0, 0.01, 1e-10)?;
        let g = gradient_trace(&f, 0.0, 0.01)?;
        let exact = small_aspect_trace(&u);
        worst = g.iter().zip(&exact).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
    }
    Ok((worst <= 1e-10, format!("max |g - (1+u)^-2| = {worst:.3e}")))
}

fn zero_data_rest() -> Result<(bool, String)> {
    let m = Model::new(ModelParams {
        lambda: 0.0,
        t_end: 0.1,
        ..small_params()
    })?;
    let z = vec![0.0; m.n()];
    let tr = run_trajectory(&m, &z, &z, RunOptions::default())?;
    let moved = tr.record.snapshots.iter().any(|(_, u)| u.iter().any(|&v| v != 0.0));
    let r = tr.ledger.max_abs_residual();
    Ok((
        !moved && r == 0.0 && tr.record.termination == Termination::Completed,
        format!("max |R| = {r:.1e}, displaced = {moved}"),
    ))
}

fn decay_constants_exact() -> Result<(bool, String)> {
    let a = decay_constants(1.0)?;
    let b = decay_constants(2.0)?;
    let ok = (a.b - 0.5).abs() < 1e-15
        && (a.omega - 0.2).abs() < 1e-15
        && (b.b - 0.2).abs() < 1e-15
        && (b.omega - 1.0 / 12.0).abs() < 1e-15;
    Ok((ok, format!("(b, omega) = ({}, {}), ({}, {})", a.b, a.omega, b.b, b.omega)))
}

fn parabolic_single_mode() -> Result<(bool, String)> {
    let m = Model::new(ModelParams {
        gamma: 0.0,
        lambda: 0.0,
        ..small_params()
    })?;
    let e1 = m.norms.eigenvector(0);
    let mu = m.norms.mu1();
    let mut s = PlateState::new(e1.clone(), vec![0.0; m.n()], 0.0);
    let mut worst: f64 = 0.0;
    for k in 1..=20 {
        s = step_parabolic(&m, &s)?;
        let f = (1.0 + m.params.dt * mu).powi(-k);
        worst = s.u.iter().zip(&e1).map(|(a, b)| (a - f * b).abs()).fold(worst, f64::max);
    }
    Ok((worst <= 1e-12, format!("max deviation from (1 + dt mu1)^-n e1 = {worst:.3e}")))
}

fn newton_trivial() -> Result<(bool, String)> {
    let m = Model::new(small_params())?;
    let p = newton_steady(&m, 0.0, &vec![0.0; m.n()])?;
    Ok((
        p.iterations == 0 && p.u.iter().all(|&v| v == 0.0),
        format!("{} iterations", p.iterations),
    ))
}

fn existence_time_inversion() -> Result<(bool, String)> {
    let (k, omega): (f64, f64) = (0.01, 0.2);
    let t = minimal_existence_time(k / (1.0 - (-omega).exp()), k, omega);
    let inf = minimal_existence_time(0.0, k, omega);
    Ok(((t - 1.0).abs() < 1e-12 && inf.is_infinite(), format!("T_hat = {t}, global = {inf}")))
}

fn sandwich_on_trace() -> Result<(bool, String)> {
    let m = Model::new(ModelParams {
        lambda: 0.0,
        t_end: 0.5,
        ..small_params()
    })?;
    let u0 = m.grid.sample(|x| -0.05 * (1.0 - x * x).powi(2));
    let u1 = m.norms.eigenvector(1).iter().map(|v| 0.1 * v).collect::<Vec<_>>();
    let tr = run_trajectory(
        &m,
        &u0,
        &u1,
        RunOptions {
            snapshot_every: 1,
            keep_velocities: true,
        },
    )?;
    let cfg = decay_constants(m.params.gamma1)?;
    let trace = evaluate_decay_trace(&tr.record, &u0, &cfg, &m)?;
    let rep = verify_decay_inequality(&trace, &cfg);
    Ok((
        trace.violations.is_empty() && rep.passed,
        format!(
            "{} samples, {} sandwich violations, envelope margin {:.3e}",
            trace.samples.len(),
            trace.violations.len(),
            rep.min_margin
        ),
    ))
}

fn manufactured_convergence() -> Result<(bool, String)> {
    let (errs, orders) = ManufacturedCase::default().convergence(31, 3, 1e-10)?;
    let ok = orders.iter().all(|&o| o >= 1.9);
    Ok((ok, format!("errors {}, orders {}", sci(&errs), fixed(&orders))))
}

/// `gamma^2 z'' + z' + mu z = 0`, `z(0) = 1`, `z'(0) = 0`.
pub fn damped_mode(gamma: f64, mu: f64, t: f64) -> f64 {
    let g2 = gamma * gamma;
    let disc = 1.0 - 4.0 * g2 * mu;
    if disc < 0.0 {
        let s = -1.0 / (2.0 * g2);
        let w = (-disc).sqrt() / (2.0 * g2);
        (s * t).exp() * ((w * t).cos() - s / w * (w * t).sin())
    } else {
        let q = disc.sqrt();
        let (r1, r2) = ((-1.0 + q) / (2.0 * g2), (-1.0 - q) / (2.0 * g2));
        (r2 * (r1 * t).exp() - r1 * (r2 * t).exp()) / (r2 - r1)
    }
}

fn wave_single_mode() -> Result<(bool, String)> {
    let mut errs = Vec::new();
    for dt in [4e-3, 2e-3, 1e-3] {
        let m = Model::new(ModelParams {
            gamma: 0.2,
            lambda: 0.0,
            dt,
            t_end: 1.0,
            ledger_stride: (0.02 / dt).round() as usize,
            ..small_params()
        })?;
        let e1 = m.norms.eigenvector(0);
        let tr = run_trajectory(&m, &e1, &vec![0.0; m.n()], RunOptions::default())?;
        let mu = m.norms.mu1();
        let mut worst: f64 = 0.0;
        for (t, u) in &tr.record.snapshots {
            let c = m.norms.coefficients(u)?[0];
            worst = worst.max((c - damped_mode(0.2, mu, *t)).abs());
        }
        errs.push(worst);
    }
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok((orders.iter().all(|&o| o >= 1.8), format!("errors {}, orders {}", sci(&errs), fixed(&orders))))
}

fn energy_residual_order() -> Result<(bool, String)> {
    let mut rs = Vec::new();
    for dt in [2e-3, 1e-3, 5e-4] {
        let m = Model::new(ModelParams {
            gamma: 0.2,
            lambda: 0.0,
            dt,
            ledger_stride: (0.02 / dt).round() as usize,
            ..small_params()
        })?;
        let u0 = m.grid.sample(|x| 0.1 * (1.0 - x * x).powi(3));
        let tr = run_trajectory(&m, &u0, &vec![0.0; m.n()], RunOptions::default())?;
        rs.push(tr.ledger.max_abs_residual());
    }
    let orders: Vec<f64> = rs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok((orders.iter().all(|&o| o >= 1.8), format!("max |R| {}, orders {}", sci(&rs), fixed(&orders))))
}

fn newton_matches_parabolic() -> Result<(bool, String)> {
    let m = Model::new(ModelParams {
        gamma: 0.0,
        lambda: 0.1,
        dt: 0.01,
        t_end: 3.0,
        ledger_stride: 100,
        ..small_params()
    })?;
    let z = vec![0.0; m.n()];
    let steady = newton_steady(&m, 0.1, &z)?;
    let tr = run_trajectory(&m, &z, &z, RunOptions::default())?;
    let u = &tr.record.final_state.u;
    let d = u.iter().zip(&steady.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((d <= 1e-6, format!("max |U_newton - u(T)| = {d:.3e}")))
}

fn quick_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("flat plate potential is exact", flat_plate_exact as Check),
        ("small-aspect closed form", small_aspect_closed_form),
        ("zero data stays at rest", zero_data_rest),
        ("decay constants", decay_constants_exact),
        ("parabolic single-mode recursion", parabolic_single_mode),
        ("newton at zero voltage", newton_trivial),
        ("existence-time inversion", existence_time_inversion),
        ("lyapunov sandwich", sandwich_on_trace),
    ]
}

fn full_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("manufactured potential convergence", manufactured_convergence as Check),
        ("wave single-mode oracle", wave_single_mode),
        ("energy residual order", energy_residual_order),
        ("newton matches parabolic limit", newton_matches_parabolic),
    ]
}

/// Runs the checks of `level`; a check that errors counts as failed.
pub fn cmd_verify(level: VerifyLevel) -> VerifyReport {
    let mut list = quick_checks();
    if level == VerifyLevel::Full {
        list.extend(full_checks());
    }
    let checks = list
        .into_iter()
        .map(|(name, f)| {
            let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            VerifyCheck {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    VerifyReport { level, checks }
}
