//! A fully assembled discretisation: grids, plate operator, spectral norms
//! and the potential solver for one parameter set.

use crate::error::Result;
use crate::grid::{Grid1D, Grid2D};
use crate::norms::FractionalNormContext;
use crate::params::ModelParams;
use crate::plate::PlateOperator;
use crate::potential::{Electrostatics, PotentialSolver};

/// Plate displacement and velocity on the interior nodes at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl PlateState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, t: f64) -> Self {
        Self { u, v, t }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0.0; n], vec![0.0; n], 0.0)
    }

    pub fn min_gap(&self) -> f64 {
        self.u.iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v))
    }

    pub fn is_admissible(&self) -> bool {
        self.min_gap() > 0.0
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub grid: Grid1D,
    pub op: PlateOperator,
    pub norms: FractionalNormContext,
    pub potential: PotentialSolver,
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let grid = Grid1D::new(params.nx)?;
        let op = PlateOperator::assemble(&grid, params.beta, params.tau)?;
        let norms = FractionalNormContext::new(&op, params.alpha(), params.tol_linear)?;
        let grid2 = Grid2D::new(grid.clone(), params.neta)?;
        let potential =
            PotentialSolver::new(grid2, params.eps, params.kappa_stop, params.tol_linear);
        Ok(Self {
            params,
            grid,
            op,
            norms,
            potential,
        })
    }

    /// Same discretisation driven by the closed-form `eps = 0` forcing.
    pub fn with_small_aspect(mut self) -> Self {
        self.potential = PotentialSolver::small_aspect(
            self.potential.grid.clone(),
            self.params.kappa_stop,
            self.params.tol_linear,
        );
        self.params.eps = 0.0;
        self
    }

    pub fn electrostatics(&self) -> Electrostatics {
        self.potential.model
    }

    /// Clone with a different voltage parameter, reusing the assembled
    /// operator and spectral data.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        let mut m = self.clone();
        m.params.lambda = lambda;
        m
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        let mut m = self.clone();
        m.params.gamma = gamma;
        m
    }

    pub fn n(&self) -> usize {
        self.grid.n_interior()
    }

    /// `E(u) = E_m(u) - lambda E_e(u)`; `E_e` is skipped when `lambda = 0`.
    pub fn total_energy(&self, u: &[f64]) -> Result<f64> {
        let em = self.op.mechanical_energy(u);
        if self.params.lambda == 0.0 {
            return Ok(em);
        }
        Ok(em - self.params.lambda * self.potential.energy(u)?)
    }
}
