//! Coefficients of the potential equation pulled back to `I x (0, 1)`.
//!
//! With `eta = (1 + z) / (1 + u(x))` and `phi(x, eta) = psi(x, z)`, the chain
//! rule turns `eps^2 psi_xx + psi_zz = 0` into
//!
//! ```text
//! a phi_xx + b phi_x,eta + c phi_eta,eta + d phi_eta = 0
//! a = eps^2
//! b = -2 eps^2 eta u_x / (1 + u)
//! c = (1 + eps^2 eta^2 u_x^2) / (1 + u)^2
//! d = eps^2 eta (2 u_x^2 / (1 + u)^2 - u_xx / (1 + u))
//! ```
//!
//! using `eta_x = -eta u_x / (1 + u)`, `eta_z = 1 / (1 + u)` and
//! `eta_xx = eta (2 u_x^2 / (1 + u)^2 - u_xx / (1 + u))`.

use crate::error::{MemsError, Result};
use crate::grid::{Grid1D, Grid2D};

/// Samples of `u`, `u_x`, `u_xx` on the interior plate nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub uxx: Vec<f64>,
}

impl GapProfile {
    /// Centred differences with the clamped closure `u(+-1) = 0`.
    pub fn from_plate(grid: &Grid1D, u: &[f64]) -> Result<Self> {
        grid.check_len(u, "displacement")?;
        let n = u.len();
        let h = grid.h();
        let at = |i: isize| -> f64 {
            if i < 0 || i as usize >= n {
                0.0
            } else {
                u[i as usize]
            }
        };
        let mut ux = Vec::with_capacity(n);
        let mut uxx = Vec::with_capacity(n);
        for i in 0..n as isize {
            ux.push((at(i + 1) - at(i - 1)) / (2.0 * h));
            uxx.push((at(i + 1) - 2.0 * at(i) + at(i - 1)) / (h * h));
        }
        Ok(Self {
            u: u.to_vec(),
            ux,
            uxx,
        })
    }

    /// Explicit samples, e.g. analytic derivatives or test fixtures.
    pub fn from_samples(u: Vec<f64>, ux: Vec<f64>, uxx: Vec<f64>) -> Result<Self> {
        if u.len() != ux.len() || u.len() != uxx.len() {
            return Err(MemsError::Argument(format!(
                "profile arrays differ in length: {}, {}, {}",
                u.len(),
                ux.len(),
                uxx.len()
            )));
        }
        Ok(Self { u, ux, uxx })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `(min(1 + u), argmin index)`.
    pub fn min_gap(&self) -> (f64, usize) {
        self.u
            .iter()
            .enumerate()
            .fold((f64::INFINITY, 0), |(m, k), (i, &v)| {
                if 1.0 + v < m {
                    (1.0 + v, i)
                } else {
                    (m, k)
                }
            })
    }

    /// Fails with a touchdown error when the gap drops below `kappa_stop`.
    pub fn ensure_gap(&self, grid: &Grid1D, kappa_stop: f64) -> Result<()> {
        let (gap, i) = self.min_gap();
        if !(gap >= kappa_stop) {
            return Err(MemsError::Touchdown {
                min_gap: gap,
                threshold: kappa_stop,
                x: grid.x(i + 1),
            });
        }
        Ok(())
    }
}

/// Coefficient arrays on interior nodes, indexed `(i - 1) * m + (j - 1)`.
#[derive(Debug, Clone)]
pub struct TransformedCoefficients {
    pub a: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub nx: usize,
    pub m: usize,
}

impl TransformedCoefficients {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.m + (j - 1)
    }
}

/// Pointwise coefficients `(a, b, c, d)` at height `eta` over a plate point
/// with local values `u`, `u_x`, `u_xx`.
#[inline]
pub fn coefficients_at(eps: f64, eta: f64, u: f64, ux: f64, uxx: f64) -> (f64, f64, f64, f64) {
    let e2 = eps * eps;
    let gap = 1.0 + u;
    let a = e2;
    let b = -2.0 * e2 * eta * ux / gap;
    let c = (1.0 + e2 * eta * eta * ux * ux) / (gap * gap);
    let d = e2 * eta * (2.0 * ux * ux / (gap * gap) - uxx / gap);
    (a, b, c, d)
}

pub fn derive_transformed_pde(
    grid: &Grid2D,
    profile: &GapProfile,
    eps: f64,
    kappa_stop: f64,
) -> Result<TransformedCoefficients> {
    grid.x.check_len(&profile.u, "gap profile")?;
    profile.ensure_gap(&grid.x, kappa_stop)?;
    let nx = grid.x.n_interior();
    let m = grid.m_interior();
    let mut b = vec![0.0; nx * m];
    let mut c = vec![0.0; nx * m];
    let mut d = vec![0.0; nx * m];
    for i in 1..=nx {
        let (u, ux, uxx) = (profile.u[i - 1], profile.ux[i - 1], profile.uxx[i - 1]);
        for j in 1..=m {
            let (_, bb, cc, dd) = coefficients_at(eps, grid.eta(j), u, ux, uxx);
            let k = (i - 1) * m + (j - 1);
            b[k] = bb;
            c[k] = cc;
            d[k] = dd;
        }
    }
    Ok(TransformedCoefficients {
        a: eps * eps,
        b,
        c,
        d,
        nx,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::new(Grid1D::new(15).unwrap(), 7).unwrap()
    }

    #[test]
    fn flat_plate_gives_constant_coefficients() {
        let g = grid();
        let p = GapProfile::from_plate(&g.x, &[0.0; 15]).unwrap();
        let t = derive_transformed_pde(&g, &p, 0.4, 0.01).unwrap();
        assert!((t.a - 0.16).abs() < 1e-15);
        assert!(t.b.iter().all(|&v| v == 0.0));
        assert!(t.c.iter().all(|&v| v == 1.0));
        assert!(t.d.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_aspect_ratio_keeps_only_c() {
        let g = grid();
        let u = g.x.sample(|x| -0.4 * (1.0 - x * x).powi(2));
        let p = GapProfile::from_plate(&g.x, &u).unwrap();
        let t = derive_transformed_pde(&g, &p, 0.0, 0.01).unwrap();
        for i in 1..=15 {
            for j in 1..=7 {
                let k = t.index(i, j);
                assert_eq!(t.b[k], 0.0);
                assert_eq!(t.d[k], 0.0);
                let want = 1.0 / (1.0 + u[i - 1]).powi(2);
                assert!((t.c[k] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ellipticity_positive() {
        let g = grid();
        let u = g.x.sample(|x| -0.9 * (1.0 - x * x).powi(2));
        let p = GapProfile::from_plate(&g.x, &u).unwrap();
        let t = derive_transformed_pde(&g, &p, 1.0, 0.01).unwrap();
        assert!(t.c.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn touchdown_below_threshold() {
        let g = grid();
        let mut u = vec![0.0; 15];
        u[7] = -0.995;
        let p = GapProfile::from_plate(&g.x, &u).unwrap();
        match derive_transformed_pde(&g, &p, 0.3, 0.01) {
            Err(MemsError::Touchdown { min_gap, x, .. }) => {
                assert!((min_gap - 0.005).abs() < 1e-12);
                assert!(x.abs() < 1e-12);
            }
            other => panic!("expected touchdown, got {other:?}"),
        }
    }

    #[test]
    fn centred_differences_use_clamped_closure() {
        let g = Grid1D::new(9).unwrap();
        let mut u = vec![0.0; 9];
        u[0] = 1.0;
        let p = GapProfile::from_plate(&g, &u).unwrap();
        let h = g.h();
        assert!((p.ux[0]).abs() < 1e-15);
        assert!((p.ux[1] + 1.0 / (2.0 * h)).abs() < 1e-12);
        assert!((p.uxx[0] + 2.0 / (h * h)).abs() < 1e-9);
    }
}
