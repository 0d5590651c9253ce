//! Newton iteration for `A_h U + lambda g(U) = 0`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MemsError, Result};
use crate::model::Model;

/// Relative step of the forward-difference Jacobian of `g`.
pub const FD_STEP: f64 = 1e-6;
/// The Jacobian is rebuilt every this many Newton steps.
pub const JACOBIAN_REFRESH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Undetermined,
}

impl Stability {
    pub fn label(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Undetermined => "undetermined",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "stable" => Some(Stability::Stable),
            "unstable" => Some(Stability::Unstable),
            "undetermined" => Some(Stability::Undetermined),
            _ => None,
        }
    }

    /// Sign of the smallest real part of the linearisation spectrum, with a
    /// dead zone of `tol`.
    pub fn classify(min_eig: f64, tol: f64) -> Self {
        if min_eig > tol {
            Stability::Stable
        } else if min_eig < -tol {
            Stability::Unstable
        } else {
            Stability::Undetermined
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchPoint {
    pub lambda: f64,
    pub u: Vec<f64>,
    pub min_gap: f64,
    pub sup_norm: f64,
    /// Arclength coordinate along the branch.
    pub s: f64,
    pub stability: Stability,
    /// `||A_h U + lambda g(U)||_h`
    pub residual: f64,
    /// Smallest real part of the Jacobian spectrum.
    pub min_eig: f64,
    pub iterations: usize,
}

/// Residual level below which `A_h U + lambda g(U)` is dominated by
/// rounding in the `h^-4` stencil: `8 eps_mach ||A_h||_inf ||U||_inf`, never
/// below `tol_newton`.
pub fn residual_floor(model: &Model, u: &[f64]) -> f64 {
    let sup = u.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    (8.0 * f64::EPSILON * model.op.inf_norm() * sup).max(model.params.tol_newton)
}

/// `A_h U + lambda g(U)`.
pub fn steady_residual(model: &Model, lambda: f64, u: &[f64]) -> Result<Vec<f64>> {
    let mut r = model.op.apply(u);
    if lambda != 0.0 {
        let g = model.potential.g(u)?;
        r.iter_mut().zip(&g).for_each(|(ri, gi)| *ri += lambda * gi);
    }
    Ok(r)
}

/// Forward-difference Jacobian of `g` at `u`, columns in parallel.
pub fn trace_jacobian(model: &Model, u: &[f64], g0: &[f64]) -> Result<DMatrix<f64>> {
    let n = u.len();
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut w = u.to_vec();
            let d = FD_STEP * (1.0 + u[j].abs());
            w[j] += d;
            let gj = model.potential.g(&w)?;
            Ok(gj.iter().zip(g0).map(|(a, b)| (a - b) / d).collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n, |i, j| cols[j][i]))
}

/// `A_h + lambda Dg(U)` together with `g(U)`.
pub fn steady_jacobian(model: &Model, lambda: f64, u: &[f64]) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let g = model.potential.g(u)?;
    let mut j = model.op.dense();
    if lambda != 0.0 {
        j += trace_jacobian(model, u, &g)? * lambda;
    }
    Ok((j, g))
}

/// Smallest real part of the spectrum of `j` and the classification
/// dead zone `1e-8 ||j||_inf`.
pub fn spectral_stability(j: &DMatrix<f64>) -> (f64, Stability) {
    let min_eig = j
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let norm = j
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (min_eig, Stability::classify(min_eig, 1e-8 * norm))
}

pub(crate) fn make_point(
    model: &Model,
    lambda: f64,
    u: Vec<f64>,
    s: f64,
    jac: &DMatrix<f64>,
    iterations: usize,
) -> Result<BranchPoint> {
    let r = steady_residual(model, lambda, &u)?;
    let residual = model.grid.l2_norm(&r);
    let (min_eig, stability) = spectral_stability(jac);
    Ok(BranchPoint {
        lambda,
        min_gap: u.iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v)),
        sup_norm: u.iter().fold(0.0f64, |m, &v| m.max(v.abs())),
        u,
        s,
        stability,
        residual,
        min_eig,
        iterations,
    })
}

/// Damped Newton with a frozen finite-difference Jacobian refreshed every
/// [`JACOBIAN_REFRESH`] steps. Converges when `||A_h U + lambda g(U)||_h`
/// drops to `tol_newton`, or, once rounding dominates, when a fresh Jacobian
/// step no longer reduces a residual already within [`residual_floor`].
pub fn newton_steady(model: &Model, lambda: f64, guess: &[f64]) -> Result<BranchPoint> {
    let p = &model.params;
    model.grid.check_len(guess, "initial guess")?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(MemsError::Parameter(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    if guess.iter().any(|&v| !v.is_finite() || 1.0 + v <= 0.0) {
        return Err(MemsError::Admissibility(
            "initial guess must be finite with positive gap".into(),
        ));
    }
    let mut u = guess.to_vec();
    let mut r = steady_residual(model, lambda, &u)?;
    let mut rn = model.grid.l2_norm(&r);
    let mut lu = None;
    let mut age = 0;
    let mut it = 0;
    while rn > p.tol_newton {
        if it >= p.max_newton_iters {
            return Err(MemsError::Convergence {
                iterations: it,
                residual: rn,
            });
        }
        it += 1;
        let mut fresh = false;
        if lu.is_none() || age >= JACOBIAN_REFRESH {
            lu = Some(steady_jacobian(model, lambda, &u)?.0.lu());
            age = 0;
            fresh = true;
        }
        age += 1;
        let step = lu
            .as_ref()
            .unwrap()
            .solve(&DVector::from_column_slice(&r))
            .ok_or_else(|| MemsError::Numerical("singular Newton Jacobian".into()))?;
        match line_search(model, lambda, &u, step.as_slice(), rn)? {
            Some((un, rnew, nn)) => {
                u = un;
                r = rnew;
                rn = nn;
            }
            None if fresh && rn <= residual_floor(model, &u) => break,
            None if fresh => {
                return Err(MemsError::Convergence {
                    iterations: it,
                    residual: rn,
                })
            }
            None => lu = None,
        }
    }
    let (jac, _) = steady_jacobian(model, lambda, &u)?;
    let point = make_point(model, lambda, u, 0.0, &jac, it)?;
    if point.min_gap < p.kappa_stop {
        let (i, _) = point
            .u
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        return Err(MemsError::Touchdown {
            min_gap: point.min_gap,
            threshold: p.kappa_stop,
            x: model.grid.x(i + 1),
        });
    }
    Ok(point)
}

/// Halves `U - theta * step` until the residual decreases; iterates that
/// touch down count as failures.
fn line_search(
    model: &Model,
    lambda: f64,
    u: &[f64],
    step: &[f64],
    rn: f64,
) -> Result<Option<(Vec<f64>, Vec<f64>, f64)>> {
    let mut theta = 1.0;
    while theta >= 1.0 / 1024.0 {
        let trial: Vec<f64> = u.iter().zip(step).map(|(a, d)| a - theta * d).collect();
        match steady_residual(model, lambda, &trial) {
            Ok(r) => {
                let n = model.grid.l2_norm(&r);
                if n < rn {
                    return Ok(Some((trial, r, n)));
                }
            }
            Err(MemsError::Touchdown { .. }) => {}
            Err(e) => return Err(e),
        }
        theta *= 0.5;
    }
    Ok(None)
}
