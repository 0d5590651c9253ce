//! Empirical Lipschitz monitoring of `u -> phi_u` and `u -> g(u)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{MemsError, Result};
use crate::grid::Grid2D;
use crate::norms::FractionalNormContext;

use super::{gradient_trace, PotentialSolver};

/// Discrete `H^2(I x (0,1))` norm: root of the summed squared L2 norms of the
/// field and all of its difference quotients up to second order. `values`
/// uses the full-grid layout of [`super::PotentialField`].
pub fn discrete_h2_norm(grid: &Grid2D, values: &[f64]) -> f64 {
    let (nx2, m2) = grid.full_shape();
    assert_eq!(values.len(), nx2 * m2);
    let h = grid.x.h();
    let k = grid.k();
    let at = |i: usize, j: usize| values[i * m2 + j];
    let mut sum = 0.0;
    for i in 1..nx2 - 1 {
        for j in 1..m2 - 1 {
            let f = at(i, j);
            let fx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
            let fe = (at(i, j + 1) - at(i, j - 1)) / (2.0 * k);
            let fxx = (at(i + 1, j) - 2.0 * f + at(i - 1, j)) / (h * h);
            let fee = (at(i, j + 1) - 2.0 * f + at(i, j - 1)) / (k * k);
            let fxe = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1))
                / (4.0 * h * k);
            sum += f * f + fx * fx + fe * fe + fxx * fxx + fee * fee + fxe * fxe;
        }
    }
    (h * k * sum).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LipschitzReport {
    /// `u1 == u2`; both quotients are 0/0.
    IdenticalInputs,
    Ratios {
        /// `||phi_1 - phi_2||_{h,2} / ||u1 - u2||_(1+alpha)`
        potential: f64,
        /// `||g(u1) - g(u2)||_(alpha) / ||u1 - u2||_(1+alpha)`
        trace: f64,
        /// `||u1 - u2||_(1+alpha)`
        distance: f64,
    },
}

impl LipschitzReport {
    pub fn potential_ratio(&self) -> Option<f64> {
        match self {
            LipschitzReport::IdenticalInputs => None,
            LipschitzReport::Ratios { potential, .. } => Some(*potential),
        }
    }

    pub fn trace_ratio(&self) -> Option<f64> {
        match self {
            LipschitzReport::IdenticalInputs => None,
            LipschitzReport::Ratios { trace, .. } => Some(*trace),
        }
    }
}

/// Difference quotients for two states in `S_alpha(kappa)`.
pub fn lipschitz_probe(
    u1: &[f64],
    u2: &[f64],
    solver: &PotentialSolver,
    ctx: &FractionalNormContext,
    kappa: f64,
) -> Result<LipschitzReport> {
    for (name, u) in [("u1", u1), ("u2", u2)] {
        let r = ctx.check_s_alpha(u, kappa)?;
        if !r.member {
            return Err(MemsError::Admissibility(format!(
                "{name} is not in S_alpha({kappa}): norm {:.4e} (bound {:.4e}), min gap {:.4e}",
                r.norm, r.norm_bound, r.min_gap
            )));
        }
    }
    if u1 == u2 {
        return Ok(LipschitzReport::IdenticalInputs);
    }
    let du: Vec<f64> = u1.iter().zip(u2).map(|(a, b)| a - b).collect();
    let distance = ctx.state_norm(&du)?;
    if distance == 0.0 {
        return Ok(LipschitzReport::IdenticalInputs);
    }
    let f1 = solver.solve(u1)?;
    let f2 = solver.solve(u2)?;
    let dphi: Vec<f64> = f1.values().iter().zip(f2.values()).map(|(a, b)| a - b).collect();
    let g1 = gradient_trace(&f1, solver.eps, solver.kappa_stop)?;
    let g2 = gradient_trace(&f2, solver.eps, solver.kappa_stop)?;
    let dg: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
    Ok(LipschitzReport::Ratios {
        potential: discrete_h2_norm(&solver.grid, &dphi) / distance,
        trace: ctx.fractional_norm(&dg, ctx.alpha())? / distance,
        distance,
    })
}

/// Smooth random state inside `S_alpha(kappa)`, built from the lowest
/// `n_modes` eigenvectors with coefficients decaying like `1/k^2`.
pub fn random_admissible(
    ctx: &FractionalNormContext,
    kappa: f64,
    n_modes: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let n = ctx.grid().n_interior();
    let mut c = vec![0.0; n];
    for (k, ck) in c.iter_mut().enumerate().take(n_modes.min(n)) {
        *ck = rng.gen_range(-1.0..1.0) / ((k + 1) * (k + 1)) as f64;
    }
    let w = ctx.synthesize(&c);
    let norm = ctx.state_norm(&w)?;
    if norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut s_max = (1.0 / kappa) / norm;
    let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
    if wmin < 0.0 {
        s_max = s_max.min((1.0 - kappa) / (-wmin));
    }
    let wmax = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if wmax > 0.0 {
        // keep the plate on the ground side of its rest position scale
        s_max = s_max.min(1.0 / wmax);
    }
    let s = rng.gen_range(0.0..1.0) * 0.999 * s_max;
    Ok(w.iter().map(|v| v * s).collect())
}

/// Largest sampled potential and trace quotients over random nearby pairs in
/// `S_alpha(kappa)`; a lower bound for the true Lipschitz constants.
pub fn sample_lipschitz(
    solver: &PotentialSolver,
    ctx: &FractionalNormContext,
    kappa: f64,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut cp, mut cg) = (0.0f64, 0.0f64);
    let mut taken = 0;
    let mut attempts = 0;
    while taken < samples && attempts < 20 * samples.max(1) {
        attempts += 1;
        let u1 = random_admissible(ctx, kappa, 8, &mut rng)?;
        let dir = random_admissible(ctx, kappa, 8, &mut rng)?;
        let scale = rng.gen_range(0.02..0.2);
        let u2: Vec<f64> = u1.iter().zip(&dir).map(|(a, d)| a + scale * d).collect();
        if !ctx.check_s_alpha(&u2, kappa)?.member {
            continue;
        }
        if let LipschitzReport::Ratios { potential, trace, .. } =
            lipschitz_probe(&u1, &u2, solver, ctx, kappa)?
        {
            cp = cp.max(potential);
            cg = cg.max(trace);
            taken += 1;
        }
    }
    Ok((cp, cg))
}
