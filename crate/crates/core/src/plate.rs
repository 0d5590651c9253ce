//! The discrete clamped plate operator `A_h ~ beta d^4/dx^4 - tau d^2/dx^2`.
//!
//! Interior rows carry `beta [1, -4, 6, -4, 1] / h^4 + tau [-1, 2, -1] / h^2`.
//! At each wall `u_0 = 0` and the ghost value is reflected, `u_{-1} = u_1`,
//! which enforces `u_x(+-1) = 0` and keeps the matrix symmetric.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::banded::{BandLu, BandMatrix};
use crate::error::{MemsError, Result};
use crate::grid::Grid1D;

#[derive(Debug)]
pub struct PlateOperator {
    grid: Grid1D,
    beta: f64,
    tau: f64,
    matrix: BandMatrix,
    factor_cache: Mutex<HashMap<(u64, u64), Arc<BandLu>>>,
}

impl Clone for PlateOperator {
    fn clone(&self) -> Self {
        Self {
            grid: self.grid.clone(),
            beta: self.beta,
            tau: self.tau,
            matrix: self.matrix.clone(),
            factor_cache: Mutex::new(HashMap::new()),
        }
    }
}

/// Smallest eigenvalue of `A_h` with its eigenvector, normalised to unit
/// discrete L2 norm and positive mean.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl PlateOperator {
    pub fn assemble(grid: &Grid1D, beta: f64, tau: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(MemsError::Parameter(format!("beta must be > 0, got {beta}")));
        }
        if tau < 0.0 || !tau.is_finite() {
            return Err(MemsError::Parameter(format!("tau must be >= 0, got {tau}")));
        }
        let n = grid.n_interior();
        let h = grid.h();
        let b = beta / h.powi(4);
        let t = tau / (h * h);
        let mut m = BandMatrix::zeros(n, 2, 2);
        for i in 0..n {
            m.add(i, i, 6.0 * b + 2.0 * t);
            if i >= 1 {
                m.add(i, i - 1, -4.0 * b - t);
            }
            if i + 1 < n {
                m.add(i, i + 1, -4.0 * b - t);
            }
            if i >= 2 {
                m.add(i, i - 2, b);
            }
            if i + 2 < n {
                m.add(i, i + 2, b);
            }
        }
        // ghost reflection at both walls
        m.add(0, 0, b);
        m.add(n - 1, n - 1, b);
        Ok(Self {
            grid: grid.clone(),
            beta,
            tau,
            matrix: m,
            factor_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.grid.n_interior();
        nalgebra::DMatrix::from_fn(n, n, |i, j| self.matrix.get(i, j))
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }

    /// `(1/2) <A_h u, u>_h`. With the ghost closure this equals the
    /// trapezoidal `(beta/2)||u_xx||^2 + (tau/2)||u_x||^2` of the sampled field.
    pub fn mechanical_energy(&self, u: &[f64]) -> f64 {
        0.5 * self.grid.inner(&self.apply(u), u)
    }

    fn shifted_factor(&self, sigma: f64, c: f64) -> Result<Arc<BandLu>> {
        let key = (sigma.to_bits(), c.to_bits());
        let mut cache = self.factor_cache.lock().expect("factor cache poisoned");
        if let Some(f) = cache.get(&key) {
            return Ok(Arc::clone(f));
        }
        let n = self.grid.n_interior();
        let mut m = BandMatrix::zeros(n, 2, 2);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let mut v = c * self.matrix.get(i, j);
                if i == j {
                    v += sigma;
                }
                if v != 0.0 {
                    m.add(i, j, v);
                }
            }
        }
        let f = Arc::new(m.factor()?);
        cache.insert(key, Arc::clone(&f));
        Ok(f)
    }

    /// Solves `(sigma I + c A_h) z = rhs`. Factorisations are cached per
    /// `(sigma, c)`.
    pub fn solve_shifted(&self, sigma: f64, c: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        self.grid.check_len(rhs, "solve_shifted rhs")?;
        if !(sigma >= 0.0) || !(c >= 0.0) || sigma + c == 0.0 {
            return Err(MemsError::Numerical(format!(
                "shifted system sigma = {sigma}, c = {c} is singular"
            )));
        }
        let f = self.shifted_factor(sigma, c)?;
        Ok(f.solve(rhs))
    }

    pub fn cached_factorisations(&self) -> usize {
        self.factor_cache.lock().map(|c| c.len()).unwrap_or(0)
    }

    /// Max absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        let n = self.grid.n_interior();
        (0..n)
            .map(|i| {
                (i.saturating_sub(2)..=(i + 2).min(n - 1))
                    .map(|j| self.matrix.get(i, j).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Principal eigenpair by inverse iteration on the banded factorisation.
    /// Converged once `||A e - mu e|| <= tol ||A||_inf` (backward error
    /// relative to the operator scale).
    pub fn principal_eigenpair(&self, tol: f64, max_iters: usize) -> Result<Eigenpair> {
        let g = &self.grid;
        let n = g.n_interior();
        let scale = self.inf_norm();
        let mut x: Vec<f64> = g.sample(|x| (1.0 - x * x).powi(2));
        let nrm = g.l2_norm(&x);
        x.iter_mut().for_each(|v| *v /= nrm);
        let mut residual = f64::INFINITY;
        let mut mu = 0.0;
        for it in 1..=max_iters {
            let mut y = self.solve_shifted(0.0, 1.0, &x)?;
            let nrm = g.l2_norm(&y);
            y.iter_mut().for_each(|v| *v /= nrm);
            let ay = self.apply(&y);
            mu = g.inner(&ay, &y);
            let r: Vec<f64> = (0..n).map(|i| ay[i] - mu * y[i]).collect();
            residual = g.l2_norm(&r);
            x = y;
            if residual <= tol * scale {
                if x.iter().sum::<f64>() < 0.0 {
                    x.iter_mut().for_each(|v| *v = -*v);
                }
                return Ok(Eigenpair {
                    value: mu,
                    vector: x,
                    iterations: it,
                    residual,
                });
            }
        }
        Err(MemsError::Numerical(format!(
            "inverse iteration did not converge in {max_iters} iterations \
             (last estimate {mu:.12e}, residual {residual:.3e})"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn op(n: usize, beta: f64, tau: f64) -> PlateOperator {
        PlateOperator::assemble(&Grid1D::new(n).unwrap(), beta, tau).unwrap()
    }

    #[test]
    fn stencil_rows() {
        let a = op(9, 1.0, 0.0);
        let h4 = a.grid().h().powi(4);
        assert!((a.entry(4, 4) * h4 - 6.0).abs() < 1e-12);
        assert!((a.entry(4, 3) * h4 + 4.0).abs() < 1e-12);
        assert!((a.entry(4, 2) * h4 - 1.0).abs() < 1e-12);
        assert!((a.entry(0, 0) * h4 - 7.0).abs() < 1e-12);
        assert!((a.entry(8, 8) * h4 - 7.0).abs() < 1e-12);
        let t = op(9, 1.0, 1.0);
        let h2 = t.grid().h().powi(2);
        assert!((t.entry(4, 4) - a.entry(4, 4) - 2.0 / h2).abs() < 1e-9);
    }

    #[test]
    fn zero_in_zero_out() {
        let a = op(11, 1.0, 0.0);
        assert!(a.apply(&[0.0; 11]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn symmetric() {
        let a = op(40, 1.3, 0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let z: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g = a.grid();
        let l = g.inner(&a.apply(&y), &z);
        let r = g.inner(&y, &a.apply(&z));
        assert!((l - r).abs() <= 1e-12 * l.abs().max(r.abs()));
    }

    #[test]
    fn nonpositive_beta_rejected() {
        let g = Grid1D::new(9).unwrap();
        assert!(matches!(
            PlateOperator::assemble(&g, 0.0, 0.0),
            Err(MemsError::Parameter(_))
        ));
    }

    #[test]
    fn shifted_solve_trivial_cases() {
        let a = op(20, 1.0, 0.5);
        let z = a.solve_shifted(2.0, 0.3, &[0.0; 20]).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));
        let rhs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1 - 1.0).collect();
        assert_eq!(a.solve_shifted(1.0, 0.0, &rhs).unwrap(), rhs);
        assert!(a.solve_shifted(0.0, 0.0, &rhs).is_err());
    }

    #[test]
    fn shifted_solve_recovers_forward_application() {
        let a = op(50, 1.0, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let z: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (sigma, c) = (3.0, 0.01);
        let az = a.apply(&z);
        let rhs: Vec<f64> = (0..50).map(|i| sigma * z[i] + c * az[i]).collect();
        let got = a.solve_shifted(sigma, c, &rhs).unwrap();
        let err = got.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nz = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * nz, "relative error {}", err / nz);
    }

    #[test]
    fn factorisation_reuse_is_bitwise_stable() {
        let a = op(30, 1.0, 0.0);
        let rhs: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let first = a.solve_shifted(1.5, 0.25, &rhs).unwrap();
        let second = a.solve_shifted(1.5, 0.25, &rhs).unwrap();
        assert_eq!(a.cached_factorisations(), 1);
        assert_eq!(
            first.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            second.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn principal_mode_is_positive_and_tau_raises_it() {
        let a = op(63, 1.0, 0.0);
        let e = a.principal_eigenpair(1e-10, 200).unwrap();
        assert!(e.vector.iter().all(|&v| v > 0.0));
        let b = op(63, 1.0, 1.0).principal_eigenpair(1e-10, 200).unwrap();
        assert!(b.value > e.value);
    }
}
