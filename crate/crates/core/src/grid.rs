//! Uniform grids on `I = (-1, 1)` and on the fixed rectangle `I x (0, 1)`.

use crate::error::{MemsError, Result};

/// Smallest interior count supporting the five-point biharmonic stencil.
pub const MIN_INTERIOR: usize = 5;

/// Uniform grid on `[-1, 1]`; only interior nodes carry unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    n_interior: usize,
    h: f64,
}

impl Grid1D {
    pub fn new(n_interior: usize) -> Result<Self> {
        if n_interior < MIN_INTERIOR {
            return Err(MemsError::Argument(format!(
                "grid needs at least {MIN_INTERIOR} interior nodes, got {n_interior}"
            )));
        }
        Ok(Self {
            n_interior,
            h: 2.0 / (n_interior + 1) as f64,
        })
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Coordinate of node `i`, `i = 0..=n+1` (0 and n+1 are the walls).
    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_interior + 1 {
            1.0
        } else {
            -1.0 + i as f64 * self.h
        }
    }

    /// Interior node coordinates `x_1, ..., x_n`.
    pub fn interior_nodes(&self) -> Vec<f64> {
        (1..=self.n_interior).map(|i| self.x(i)).collect()
    }

    /// All node coordinates including both walls.
    pub fn all_nodes(&self) -> Vec<f64> {
        (0..=self.n_interior + 1).map(|i| self.x(i)).collect()
    }

    /// Samples `f` on the interior nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (1..=self.n_interior).map(|i| f(self.x(i))).collect()
    }

    /// Discrete L2 inner product with trapezoidal weights. Boundary values are
    /// zero for clamped fields, so only interior nodes contribute.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn l2_norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }

    pub fn check_len(&self, v: &[f64], what: &str) -> Result<()> {
        if v.len() != self.n_interior {
            return Err(MemsError::Argument(format!(
                "{what}: length {} does not match grid with {} interior nodes",
                v.len(),
                self.n_interior
            )));
        }
        Ok(())
    }
}

/// Tensor grid on `I x (0, 1)` in the `(x, eta)` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    m_interior: usize,
    k: f64,
}

impl Grid2D {
    pub fn new(x: Grid1D, m_interior: usize) -> Result<Self> {
        if m_interior < 2 {
            return Err(MemsError::Argument(format!(
                "eta grid needs at least 2 interior nodes, got {m_interior}"
            )));
        }
        Ok(Self {
            x,
            m_interior,
            k: 1.0 / (m_interior + 1) as f64,
        })
    }

    pub fn m_interior(&self) -> usize {
        self.m_interior
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `eta_j`, `j = 0..=m+1`.
    pub fn eta(&self, j: usize) -> f64 {
        if j == self.m_interior + 1 {
            1.0
        } else {
            j as f64 * self.k
        }
    }

    /// Node counts including boundaries, `(nx + 2, m + 2)`.
    pub fn full_shape(&self) -> (usize, usize) {
        (self.x.n_interior() + 2, self.m_interior + 2)
    }
}
