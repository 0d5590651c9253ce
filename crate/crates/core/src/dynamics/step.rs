//! Single time steps for the damped plate equation.

use crate::error::{MemsError, Result};
use crate::model::{Model, PlateState};

fn forcing(model: &Model, u: &[f64]) -> Result<Option<Vec<f64>>> {
    if model.params.lambda == 0.0 {
        return Ok(None);
    }
    model.potential.g(u).map(Some)
}

/// Touchdown and norm-guard checks on a freshly computed displacement.
pub fn check_guards(model: &Model, u: &[f64]) -> Result<()> {
    let (gap, i) = u
        .iter()
        .enumerate()
        .fold((f64::INFINITY, 0), |(m, k), (i, &v)| if 1.0 + v < m { (1.0 + v, i) } else { (m, k) });
    if !(gap >= model.params.kappa_stop) {
        return Err(MemsError::Touchdown {
            min_gap: gap,
            threshold: model.params.kappa_stop,
            x: model.grid.x(i + 1),
        });
    }
    let norm = model.norms.state_norm(u)?;
    let bound = 2.0 / model.params.kappa;
    if norm > bound {
        return Err(MemsError::NormGuard { norm, bound });
    }
    Ok(())
}

/// One implicit-midpoint step of `u' = v`, `gamma^2 v' = -v - A u - lambda g`.
///
/// Linear terms sit at the midpoint; `g` is frozen at the predictor
/// `u + dt/2 v`. Eliminating `u^{n+1}` leaves
/// `[(gamma^2/dt + 1/2) I + (dt/4) A] v^{n+1} =
///  (gamma^2/dt - 1/2) v - (dt/4) A v - A u - lambda g`.
pub fn step_wave(model: &Model, state: &PlateState) -> Result<PlateState> {
    let p = &model.params;
    if !(p.gamma > 0.0) {
        return Err(MemsError::Argument(format!(
            "step_wave needs gamma > 0, got {}",
            p.gamma
        )));
    }
    midpoint_step(model, state)
}

/// Midpoint update shared by [`step_wave`]; also well defined at `gamma = 0`
/// where it reduces to Crank-Nicolson for the first-order equation.
pub(crate) fn midpoint_step(model: &Model, state: &PlateState) -> Result<PlateState> {
    let p = &model.params;
    let dt = p.dt;
    let n = model.n();
    let g2 = p.gamma * p.gamma;
    let pred: Vec<f64> = (0..n).map(|i| state.u[i] + 0.5 * dt * state.v[i]).collect();
    let g = forcing(model, &pred)?;
    let av = model.op.apply(&state.v);
    let au = model.op.apply(&state.u);
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        rhs[i] = (g2 / dt - 0.5) * state.v[i] - 0.25 * dt * av[i] - au[i];
        if let Some(g) = &g {
            rhs[i] -= p.lambda * g[i];
        }
    }
    let v = model.op.solve_shifted(g2 / dt + 0.5, 0.25 * dt, &rhs)?;
    let u: Vec<f64> = (0..n).map(|i| state.u[i] + 0.5 * dt * (state.v[i] + v[i])).collect();
    check_guards(model, &u)?;
    Ok(PlateState::new(u, v, state.t + dt))
}

/// Semi-implicit Euler for `u' + A u = -lambda g(u)`:
/// `(I + dt A) u^{n+1} = u^n - dt lambda g(u^n)`. The returned velocity is the
/// difference quotient `(u^{n+1} - u^n) / dt`.
pub fn step_parabolic(model: &Model, state: &PlateState) -> Result<PlateState> {
    let p = &model.params;
    if p.gamma != 0.0 {
        return Err(MemsError::Argument(format!(
            "step_parabolic needs gamma = 0, got {}",
            p.gamma
        )));
    }
    let dt = p.dt;
    let n = model.n();
    let g = forcing(model, &state.u)?;
    let mut rhs = state.u.clone();
    if let Some(g) = &g {
        for i in 0..n {
            rhs[i] -= dt * p.lambda * g[i];
        }
    }
    let u = model.op.solve_shifted(1.0, dt, &rhs)?;
    let v: Vec<f64> = (0..n).map(|i| (u[i] - state.u[i]) / dt).collect();
    check_guards(model, &u)?;
    Ok(PlateState::new(u, v, state.t + dt))
}

/// Dispatches on `gamma`.
pub fn step(model: &Model, state: &PlateState) -> Result<PlateState> {
    if model.params.gamma > 0.0 {
        step_wave(model, state)
    } else {
        step_parabolic(model, state)
    }
}
