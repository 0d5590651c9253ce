//! The electrostatic potential in the gap, solved on the fixed rectangle
//! `I x (0, 1)`, and the plate forcing it induces.

pub mod coefficients;
pub mod lipschitz;
pub mod manufactured;
pub mod solve;
pub mod trace;

pub use coefficients::{coefficients_at, derive_transformed_pde, GapProfile, TransformedCoefficients};
pub use lipschitz::{discrete_h2_norm, lipschitz_probe, sample_lipschitz, LipschitzReport};
pub use manufactured::ManufacturedCase;
pub use solve::{solve_potential, solve_potential_forced, PotentialField};
pub use trace::{
    electrostatic_energy, electrostatic_energy_midpoint, gradient_trace, small_aspect_energy,
    small_aspect_trace,
};

use crate::error::Result;
use crate::grid::Grid2D;

/// Which electrostatic model drives the plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Electrostatics {
    /// Transformed elliptic solve at the configured aspect ratio.
    Full,
    /// Small-aspect-ratio closed form `psi = (1 + z) / (1 + u)`.
    SmallAspect,
}

/// Evaluates `g(u)` and `E_e(u)` for plate displacements on a fixed grid.
#[derive(Debug, Clone)]
pub struct PotentialSolver {
    pub grid: Grid2D,
    pub eps: f64,
    pub kappa_stop: f64,
    pub tol_linear: f64,
    pub model: Electrostatics,
}

/// Gradient trace and energy from a single potential solve.
#[derive(Debug, Clone)]
pub struct Electrostatic {
    pub g: Vec<f64>,
    pub energy: f64,
}

impl PotentialSolver {
    pub fn new(grid: Grid2D, eps: f64, kappa_stop: f64, tol_linear: f64) -> Self {
        Self {
            grid,
            eps,
            kappa_stop,
            tol_linear,
            model: Electrostatics::Full,
        }
    }

    pub fn small_aspect(grid: Grid2D, kappa_stop: f64, tol_linear: f64) -> Self {
        Self {
            grid,
            eps: 0.0,
            kappa_stop,
            tol_linear,
            model: Electrostatics::SmallAspect,
        }
    }

    pub fn profile(&self, u: &[f64]) -> Result<GapProfile> {
        GapProfile::from_plate(&self.grid.x, u)
    }

    pub fn solve(&self, u: &[f64]) -> Result<PotentialField> {
        let p = self.profile(u)?;
        solve_potential(&self.grid, &p, self.eps, self.kappa_stop, self.tol_linear)
    }

    pub fn g(&self, u: &[f64]) -> Result<Vec<f64>> {
        match self.model {
            Electrostatics::Full => gradient_trace(&self.solve(u)?, self.eps, self.kappa_stop),
            Electrostatics::SmallAspect => {
                self.profile(u)?.ensure_gap(&self.grid.x, self.kappa_stop)?;
                Ok(small_aspect_trace(u))
            }
        }
    }

    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        Ok(self.evaluate(u)?.energy)
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<Electrostatic> {
        match self.model {
            Electrostatics::Full => {
                let f = self.solve(u)?;
                Ok(Electrostatic {
                    g: gradient_trace(&f, self.eps, self.kappa_stop)?,
                    energy: electrostatic_energy(&f, self.eps),
                })
            }
            Electrostatics::SmallAspect => {
                self.profile(u)?.ensure_gap(&self.grid.x, self.kappa_stop)?;
                Ok(Electrostatic {
                    g: small_aspect_trace(u),
                    energy: small_aspect_energy(&self.grid.x, u),
                })
            }
        }
    }
}
