//! Plate-side quantities derived from a solved potential: the gradient trace
//! `g(u)` and the electrostatic energy.

use crate::error::Result;
use crate::grid::Grid1D;

use super::solve::PotentialField;

/// `g(x_i) = (1 + eps^2 u_x^2) (d_eta phi(x_i, 1))^2 / (1 + u)^2`.
///
/// Along the plate `psi = 1`, so `psi_x = -u_x psi_z` and
/// `psi_z = phi_eta / (1 + u)`.
pub fn gradient_trace(field: &PotentialField, eps: f64, kappa_stop: f64) -> Result<Vec<f64>> {
    let p = field.profile();
    p.ensure_gap(&field.grid().x, kappa_stop)?;
    let e2 = eps * eps;
    Ok((1..=p.len())
        .map(|i| {
            let gap = 1.0 + p.u[i - 1];
            let ux = p.ux[i - 1];
            let pe = field.eta_derivative_top(i);
            (1.0 + e2 * ux * ux) * pe * pe / (gap * gap)
        })
        .collect())
}

/// Closed form of the gradient trace when `eps = 0`.
pub fn small_aspect_trace(u: &[f64]) -> Vec<f64> {
    u.iter().map(|&v| 1.0 / ((1.0 + v) * (1.0 + v))).collect()
}

/// Trapezoidal `int_I 1 / (1 + u) dx`, the `eps = 0` electrostatic energy.
pub fn small_aspect_energy(grid: &Grid1D, u: &[f64]) -> f64 {
    // walls contribute 1/(1+0) with half weight each
    grid.h() * (1.0 + u.iter().map(|&v| 1.0 / (1.0 + v)).sum::<f64>())
}

/// Local integrand `[eps^2 psi_x^2 + psi_z^2] (1 + u)` in fixed variables.
#[inline]
fn integrand(e2: f64, eta: f64, u: f64, ux: f64, px: f64, pe: f64) -> f64 {
    let gap = 1.0 + u;
    let psi_x = px - eta * ux * pe / gap;
    let psi_z = pe / gap;
    (e2 * psi_x * psi_x + psi_z * psi_z) * gap
}

/// Wall-inclusive `(u, u_x)` at plate node `i = 0..=nx+1`.
fn plate_values(field: &PotentialField, i: usize) -> (f64, f64) {
    let n = field.grid().x.n_interior();
    if i == 0 || i == n + 1 {
        (0.0, 0.0)
    } else {
        let p = field.profile();
        (p.u[i - 1], p.ux[i - 1])
    }
}

/// Electrostatic energy by the trapezoidal rule on the full node set, with
/// centred differences inside and second-order one-sided differences on
/// the boundary.
pub fn electrostatic_energy(field: &PotentialField, eps: f64) -> f64 {
    let g = field.grid();
    let (nx2, m2) = g.full_shape();
    let h = g.x.h();
    let k = g.k();
    let e2 = eps * eps;
    let d = |f0: f64, f1: f64, f2: f64, step: f64| (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step);
    let mut total = 0.0;
    for i in 0..nx2 {
        let wx = if i == 0 || i == nx2 - 1 { 0.5 * h } else { h };
        let (u, ux) = plate_values(field, i);
        for j in 0..m2 {
            let wy = if j == 0 || j == m2 - 1 { 0.5 * k } else { k };
            let px = if i == 0 {
                d(field.get(0, j), field.get(1, j), field.get(2, j), h)
            } else if i == nx2 - 1 {
                -d(field.get(i, j), field.get(i - 1, j), field.get(i - 2, j), h)
            } else {
                (field.get(i + 1, j) - field.get(i - 1, j)) / (2.0 * h)
            };
            let pe = if j == 0 {
                d(field.get(i, 0), field.get(i, 1), field.get(i, 2), k)
            } else if j == m2 - 1 {
                -d(field.get(i, j), field.get(i, j - 1), field.get(i, j - 2), k)
            } else {
                (field.get(i, j + 1) - field.get(i, j - 1)) / (2.0 * k)
            };
            total += wx * wy * integrand(e2, g.eta(j), u, ux, px, pe);
        }
    }
    total
}

/// Cell-centred midpoint quadrature of the same energy. Independent of the
/// trapezoidal route; used as a consistency check.
pub fn electrostatic_energy_midpoint(field: &PotentialField, eps: f64) -> f64 {
    let g = field.grid();
    let (nx2, m2) = g.full_shape();
    let h = g.x.h();
    let k = g.k();
    let e2 = eps * eps;
    let mut total = 0.0;
    for i in 0..nx2 - 1 {
        let (u0, _) = plate_values(field, i);
        let (u1, _) = plate_values(field, i + 1);
        let u = 0.5 * (u0 + u1);
        let ux = (u1 - u0) / h;
        for j in 0..m2 - 1 {
            let eta = 0.5 * (g.eta(j) + g.eta(j + 1));
            let px = 0.5
                * ((field.get(i + 1, j) - field.get(i, j))
                    + (field.get(i + 1, j + 1) - field.get(i, j + 1)))
                / h;
            let pe = 0.5
                * ((field.get(i, j + 1) - field.get(i, j))
                    + (field.get(i + 1, j + 1) - field.get(i + 1, j)))
                / k;
            total += h * k * integrand(e2, eta, u, ux, px, pe);
        }
    }
    total
}
