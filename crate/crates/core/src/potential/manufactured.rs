//! Manufactured solutions for the transformed elliptic problem.
//!
//! The plate profile `u(x) = -a (1 - x^2)^2` and the potential
//! `phi(x, eta) = eta + c (1 - x^2) sin(pi eta)` satisfy the boundary data;
//! the forcing is the transformed operator applied to `phi` with exact
//! derivatives of both.

use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::{Grid1D, Grid2D};

use super::coefficients::{coefficients_at, GapProfile};
use super::solve::solve_potential_forced;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub eps: f64,
    /// Plate amplitude `a` in `u = -a (1 - x^2)^2`.
    pub plate_amplitude: f64,
    /// Amplitude `c` of the interior bump of `phi`.
    pub bump: f64,
}

impl Default for ManufacturedCase {
    fn default() -> Self {
        Self {
            eps: 0.5,
            plate_amplitude: 0.3,
            bump: 0.2,
        }
    }
}

impl ManufacturedCase {
    /// `(u, u_x, u_xx)`
    pub fn plate(&self, x: f64) -> (f64, f64, f64) {
        let a = self.plate_amplitude;
        let s = 1.0 - x * x;
        (-a * s * s, 4.0 * a * x * s, 4.0 * a * (1.0 - 3.0 * x * x))
    }

    pub fn phi(&self, x: f64, eta: f64) -> f64 {
        eta + self.bump * (1.0 - x * x) * (PI * eta).sin()
    }

    /// `a phi_xx + b phi_x,eta + c phi_eta,eta + d phi_eta`
    pub fn forcing(&self, x: f64, eta: f64) -> f64 {
        let (u, ux, uxx) = self.plate(x);
        let (a, b, c, d) = coefficients_at(self.eps, eta, u, ux, uxx);
        let cb = self.bump;
        let (s, co) = (PI * eta).sin_cos();
        let p_xx = -2.0 * cb * s;
        let p_xe = -2.0 * cb * x * PI * co;
        let p_ee = -cb * (1.0 - x * x) * PI * PI * s;
        let p_e = 1.0 + cb * (1.0 - x * x) * PI * co;
        a * p_xx + b * p_xe + c * p_ee + d * p_e
    }

    /// Maximum nodal error of the discrete solution on `n x m` interior
    /// nodes.
    pub fn max_error(&self, n: usize, m: usize, tol_linear: f64) -> Result<f64> {
        let grid = Grid2D::new(Grid1D::new(n)?, m)?;
        let xs = grid.x.interior_nodes();
        let samples: Vec<(f64, f64, f64)> = xs.iter().map(|&x| self.plate(x)).collect();
        let profile = GapProfile::from_samples(
            samples.iter().map(|s| s.0).collect(),
            samples.iter().map(|s| s.1).collect(),
            samples.iter().map(|s| s.2).collect(),
        )?;
        let f = |x: f64, eta: f64| self.forcing(x, eta);
        let field = solve_potential_forced(&grid, &profile, self.eps, 0.0, tol_linear, &f)?;
        let (nx2, m2) = grid.full_shape();
        let mut worst: f64 = 0.0;
        for i in 0..nx2 {
            for j in 0..m2 {
                let exact = self.phi(grid.x.x(i), grid.eta(j));
                worst = worst.max((field.get(i, j) - exact).abs());
            }
        }
        Ok(worst)
    }

    /// Errors and observed orders on successive refinements
    /// `n -> 2n + 1` starting from `n0` interior nodes in both directions.
    pub fn convergence(&self, n0: usize, levels: usize, tol_linear: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut errs = Vec::with_capacity(levels);
        let mut n = n0;
        for _ in 0..levels {
            errs.push(self.max_error(n, n, tol_linear)?);
            n = 2 * n + 1;
        }
        let orders = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        Ok((errs, orders))
    }
}
