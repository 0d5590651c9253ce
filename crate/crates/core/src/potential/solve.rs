//! Nine-point finite-difference solve of the transformed potential equation.

use crate::banded::BandMatrix;
use crate::error::{MemsError, Result};
use crate::grid::Grid2D;

use super::coefficients::{derive_transformed_pde, GapProfile, TransformedCoefficients};

/// Potential on the full `(nx + 2) x (m + 2)` node set, row index `i` along
/// `x` and column index `j` along `eta`.
#[derive(Debug, Clone)]
pub struct PotentialField {
    grid: Grid2D,
    values: Vec<f64>,
    profile: GapProfile,
    residual: f64,
}

impl PotentialField {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn profile(&self) -> &GapProfile {
        &self.profile
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.grid.m_interior() + 2) + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-scaled max-norm residual of the discrete equations.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Largest excursion outside `[0, 1]`; zero when the discrete maximum
    /// principle holds.
    pub fn max_principle_violation(&self) -> f64 {
        self.values
            .iter()
            .map(|&v| (-v).max(v - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    /// Second-order one-sided `d phi / d eta` at `eta = 1` over interior
    /// plate node `i` (1-based).
    pub fn eta_derivative_top(&self, i: usize) -> f64 {
        let m = self.grid.m_interior();
        let k = self.grid.k();
        (3.0 * self.get(i, m + 1) - 4.0 * self.get(i, m) + self.get(i, m - 1)) / (2.0 * k)
    }
}

/// Solves the homogeneous problem with Dirichlet data `phi = eta`.
pub fn solve_potential(
    grid: &Grid2D,
    profile: &GapProfile,
    eps: f64,
    kappa_stop: f64,
    tol_linear: f64,
) -> Result<PotentialField> {
    solve_potential_forced(grid, profile, eps, kappa_stop, tol_linear, &|_, _| 0.0)
}

/// Solves `a phi_xx + b phi_x,eta + c phi_eta,eta + d phi_eta = f(x, eta)`
/// with `phi = eta` on the boundary of the rectangle.
pub fn solve_potential_forced(
    grid: &Grid2D,
    profile: &GapProfile,
    eps: f64,
    kappa_stop: f64,
    tol_linear: f64,
    forcing: &dyn Fn(f64, f64) -> f64,
) -> Result<PotentialField> {
    let coeffs = derive_transformed_pde(grid, profile, eps, kappa_stop)?;
    let nx = grid.x.n_interior();
    let m = grid.m_interior();
    let h = grid.x.h();
    let k = grid.k();
    let ncols = m + 2;
    let mut values = vec![0.0; (nx + 2) * ncols];
    for i in 0..nx + 2 {
        for j in 0..ncols {
            if i == 0 || i == nx + 1 || j == 0 || j == m + 1 {
                values[i * ncols + j] = grid.eta(j);
            }
        }
    }

    let n = nx * m;
    let bw = m + 1;
    let mut mat = BandMatrix::zeros(n, bw, bw);
    let mut rhs = vec![0.0; n];
    let mut diag = vec![0.0; n];
    for i in 1..=nx {
        for j in 1..=m {
            let row = coeffs.index(i, j);
            let stencil = stencil_at(&coeffs, row, h, k);
            diag[row] = stencil[1][1].abs();
            rhs[row] = forcing(grid.x.x(i), grid.eta(j));
            for (di, srow) in stencil.iter().enumerate() {
                for (dj, &w) in srow.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    let (ii, jj) = (i + di - 1, j + dj - 1);
                    if ii == 0 || ii == nx + 1 || jj == 0 || jj == m + 1 {
                        rhs[row] -= w * values[ii * ncols + jj];
                    } else {
                        mat.add(row, coeffs.index(ii, jj), w);
                    }
                }
            }
        }
    }
    let original = mat.clone();
    let lu = mat.factor()?;
    let mut sol = lu.solve(&rhs);
    let mut residual = scaled_residual(&original, &sol, &rhs, &diag);
    if residual > tol_linear {
        // one step of iterative refinement
        let r: Vec<f64> = original
            .matvec(&sol)
            .iter()
            .zip(&rhs)
            .map(|(a, b)| b - a)
            .collect();
        let corr = lu.solve(&r);
        sol.iter_mut().zip(&corr).for_each(|(s, c)| *s += c);
        residual = scaled_residual(&original, &sol, &rhs, &diag);
    }
    if !(residual <= tol_linear) {
        return Err(MemsError::Numerical(format!(
            "potential solve residual {residual:.3e} exceeds tolerance {tol_linear:.3e}"
        )));
    }
    for i in 1..=nx {
        for j in 1..=m {
            values[i * ncols + j] = sol[coeffs.index(i, j)];
        }
    }
    Ok(PotentialField {
        grid: grid.clone(),
        values,
        profile: profile.clone(),
        residual,
    })
}

/// 3x3 stencil weights, `[di][dj]` for offsets `-1, 0, +1`.
fn stencil_at(c: &TransformedCoefficients, row: usize, h: f64, k: f64) -> [[f64; 3]; 3] {
    let ax = c.a / (h * h);
    let cy = c.c[row] / (k * k);
    let dy = c.d[row] / (2.0 * k);
    let bxy = c.b[row] / (4.0 * h * k);
    let mut s = [[0.0; 3]; 3];
    s[0][1] += ax;
    s[2][1] += ax;
    s[1][1] -= 2.0 * ax + 2.0 * cy;
    s[1][0] += cy - dy;
    s[1][2] += cy + dy;
    s[2][2] += bxy;
    s[0][0] += bxy;
    s[2][0] -= bxy;
    s[0][2] -= bxy;
    s
}

fn scaled_residual(a: &BandMatrix, x: &[f64], b: &[f64], scale: &[f64]) -> f64 {
    a.matvec(x)
        .iter()
        .zip(b)
        .zip(scale)
        .map(|((ax, bb), s)| (ax - bb).abs() / s.max(1e-300))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;

    fn grid(n: usize, m: usize) -> Grid2D {
        Grid2D::new(Grid1D::new(n).unwrap(), m).unwrap()
    }

    fn max_dev_from_eta(f: &PotentialField) -> f64 {
        let (nx2, m2) = f.grid().full_shape();
        let mut worst: f64 = 0.0;
        for i in 0..nx2 {
            for j in 0..m2 {
                worst = worst.max((f.get(i, j) - f.grid().eta(j)).abs());
            }
        }
        worst
    }

    #[test]
    fn flat_plate_reproduces_eta() {
        let g = grid(21, 11);
        let p = GapProfile::from_plate(&g.x, &[0.0; 21]).unwrap();
        for eps in [0.0, 0.1, 0.5, 1.0] {
            let f = solve_potential(&g, &p, eps, 0.01, 1e-10).unwrap();
            assert!(max_dev_from_eta(&f) < 1e-12, "eps = {eps}");
        }
    }

    #[test]
    fn zero_aspect_ratio_reproduces_eta() {
        let g = grid(21, 11);
        let u = g.x.sample(|x| -0.6 * (1.0 - x * x).powi(2));
        let p = GapProfile::from_plate(&g.x, &u).unwrap();
        let f = solve_potential(&g, &p, 0.0, 0.01, 1e-10).unwrap();
        assert!(max_dev_from_eta(&f) < 1e-12);
    }

    #[test]
    fn boundary_data_exact_and_bounded() {
        let g = grid(31, 15);
        let u = g.x.sample(|x| -0.5 * (1.0 - x * x).powi(2));
        let p = GapProfile::from_plate(&g.x, &u).unwrap();
        let f = solve_potential(&g, &p, 0.5, 0.01, 1e-10).unwrap();
        for i in 0..33 {
            assert_eq!(f.get(i, 0), 0.0);
            assert_eq!(f.get(i, 16), 1.0);
        }
        for j in 0..17 {
            assert_eq!(f.get(0, j), g.eta(j));
            assert_eq!(f.get(32, j), g.eta(j));
        }
        assert_eq!(f.max_principle_violation(), 0.0);
        assert!(f.residual() <= 1e-10);
    }
}
