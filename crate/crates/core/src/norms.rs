//! Spectral fractional norms calibrated to the discrete plate operator.
//!
//! For `z = sum_k c_k e_k` in the `A_h` eigenbasis (unit discrete L2 norm),
//! `||z||_(s) := ||A_h^{s/2} z|| = (sum_k mu_k^s c_k^2)^{1/2}`. The order
//! `s = 1 + alpha` plays the role of the `H^{2+2 alpha}` norm, `s = alpha` of
//! `H^{2 alpha}`, and `||A_h^{1/2} z||_(alpha) = ||z||_(1+alpha)` holds by
//! construction, so the norm-equivalence constants are all 1.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{MemsError, Result};
use crate::grid::Grid1D;
use crate::plate::PlateOperator;

#[derive(Debug, Clone)]
pub struct FractionalNormContext {
    grid: Grid1D,
    alpha: f64,
    eigenvalues: Vec<f64>,
    /// Euclidean-orthonormal eigenvectors as columns.
    q: DMatrix<f64>,
}

/// Outcome of the `S_alpha(kappa)` membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub member: bool,
    pub norm: f64,
    pub norm_bound: f64,
    /// `1/kappa - ||u||_(1+alpha)`; positive inside the set.
    pub norm_margin: f64,
    pub min_gap: f64,
    /// `min(1 + u) - kappa`; positive inside the set.
    pub gap_margin: f64,
}

impl FractionalNormContext {
    /// Dense symmetric eigendecomposition of `A_h`; `alpha` is half the
    /// fractional index `2 alpha`.
    pub fn new(op: &PlateOperator, alpha: f64, tol_linear: f64) -> Result<Self> {
        let grid = op.grid().clone();
        let n = grid.n_interior();
        if n > 4096 {
            return Err(MemsError::Argument(format!(
                "dense spectral norms support at most 4096 nodes, got {n}"
            )));
        }
        let eig = SymmetricEigen::new(op.dense());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        if eigenvalues[0] <= 0.0 {
            return Err(MemsError::Numerical(format!(
                "plate operator is not positive definite: mu_1 = {:.6e}",
                eigenvalues[0]
            )));
        }
        let mut q = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            if col.sum() < 0.0 {
                col.neg_mut();
            }
            q.set_column(dst, &col);
        }
        let defect = (q.transpose() * &q - DMatrix::identity(n, n)).amax();
        if defect > tol_linear.max(1e-12) * n as f64 {
            return Err(MemsError::Numerical(format!(
                "eigenvectors not orthogonal: defect {defect:.3e}"
            )));
        }
        Ok(Self {
            grid,
            alpha,
            eigenvalues,
            q,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn mu1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Eigenvector `k` (0-based) with unit discrete L2 norm.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let s = 1.0 / self.grid.h().sqrt();
        self.q.column(k).iter().map(|v| v * s).collect()
    }

    /// Coefficients `c_k = <z, e_k>_h`.
    pub fn coefficients(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(z, "fractional norm input")?;
        let zc = DVector::from_column_slice(z);
        let c = self.q.tr_mul(&zc) * self.grid.h().sqrt();
        Ok(c.iter().copied().collect())
    }

    /// Inverse of [`Self::coefficients`].
    pub fn synthesize(&self, c: &[f64]) -> Vec<f64> {
        let cv = DVector::from_column_slice(c);
        let z = &self.q * cv / self.grid.h().sqrt();
        z.iter().copied().collect()
    }

    /// `||A_h^{s/2} z||`; `s = 0` is the trapezoidal L2 norm.
    pub fn fractional_norm(&self, z: &[f64], s: f64) -> Result<f64> {
        if s == 0.0 {
            self.grid.check_len(z, "fractional norm input")?;
            return Ok(self.grid.l2_norm(z));
        }
        let c = self.coefficients(z)?;
        Ok(self.weighted_sum(&c, &c, s).max(0.0).sqrt())
    }

    /// `<A_h^{s/2} y, A_h^{s/2} z>`.
    pub fn inner(&self, y: &[f64], z: &[f64], s: f64) -> Result<f64> {
        let cy = self.coefficients(y)?;
        let cz = self.coefficients(z)?;
        Ok(self.weighted_sum(&cy, &cz, s))
    }

    fn weighted_sum(&self, a: &[f64], b: &[f64], s: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(a.iter().zip(b))
            .map(|(mu, (x, y))| mu.powf(s) * x * y)
            .sum()
    }

    /// `A_h^p z` computed spectrally.
    pub fn apply_power(&self, z: &[f64], p: f64) -> Result<Vec<f64>> {
        let mut c = self.coefficients(z)?;
        for (ck, mu) in c.iter_mut().zip(&self.eigenvalues) {
            *ck *= mu.powf(p);
        }
        Ok(self.synthesize(&c))
    }

    /// Norm of order `1 + alpha` (the `H^{2+2 alpha}` surrogate).
    pub fn state_norm(&self, u: &[f64]) -> Result<f64> {
        self.fractional_norm(u, 1.0 + self.alpha)
    }

    /// Membership in `S_alpha(kappa)`: `||u||_(1+alpha) < 1/kappa` and
    /// `min(1 + u) > kappa`.
    pub fn check_s_alpha(&self, u: &[f64], kappa: f64) -> Result<AdmissibilityReport> {
        let norm = self.state_norm(u)?;
        let min_gap = u.iter().fold(f64::INFINITY, |m, &v| m.min(1.0 + v));
        let norm_bound = 1.0 / kappa;
        Ok(AdmissibilityReport {
            member: norm < norm_bound && min_gap > kappa,
            norm,
            norm_bound,
            norm_margin: norm_bound - norm,
            min_gap,
            gap_margin: min_gap - kappa,
        })
    }
}
