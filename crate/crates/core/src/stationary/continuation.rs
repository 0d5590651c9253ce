//! Branch following in `lambda`, natural or pseudo-arclength, with fold
//! detection.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{MemsError, Result};
use crate::model::Model;

use super::newton::{
    make_point, newton_steady, residual_floor, steady_jacobian, steady_residual, BranchPoint,
    JACOBIAN_REFRESH,
};

/// Steps below this size end the branch.
pub const MIN_STEP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuationOptions {
    pub lambda_start: f64,
    /// Initial step: `Delta lambda` for natural continuation, `Delta s` with
    /// arclength on.
    pub step: f64,
    pub max_step: f64,
    pub arclength: bool,
    pub max_points: usize,
    /// Stop once the branch gap falls below this.
    pub min_gap_stop: f64,
    /// Corrector iterations before the step is halved.
    pub max_corrector_iters: usize,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            lambda_start: 0.0,
            step: 0.5,
            max_step: 2.0,
            arclength: true,
            max_points: 200,
            min_gap_stop: 0.15,
            max_corrector_iters: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchTermination {
    MaxPoints,
    /// Step fell below [`MIN_STEP`].
    StepUnderflow { step: f64 },
    GapLimit { min_gap: f64 },
    /// The branch returned below `lambda_start`.
    LambdaLimit { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldEstimate {
    /// Largest `lambda` among the computed points.
    pub lambda_max: f64,
    /// Vertex of the parabola `lambda(s)` through the three points around
    /// the maximum; equals `lambda_max` when no bracket exists.
    pub lambda_refined: f64,
    pub index: usize,
    pub s: f64,
    pub min_gap: f64,
    /// Whether the `lambda` component of the tangent changed sign.
    pub turned: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub fold: Option<FoldEstimate>,
    pub termination: BranchTermination,
}

impl Branch {
    pub fn lambda_max(&self) -> f64 {
        self.points.iter().map(|p| p.lambda).fold(f64::NEG_INFINITY, f64::max)
    }
}

fn weighted_dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64
}

/// Unit tangent `(t_U, t_lambda)` in the norm `|t_U|^2 / n + t_lambda^2`,
/// from the bordered system `[J g; w^T] t = [0; 1]`.
fn tangent(jac: &DMatrix<f64>, g: &[f64], prev: Option<(&[f64], f64)>) -> Result<(Vec<f64>, f64)> {
    let n = g.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(jac);
    for i in 0..n {
        m[(i, n)] = g[i];
    }
    match prev {
        Some((tu, tl)) => {
            for j in 0..n {
                m[(n, j)] = tu[j] / n as f64;
            }
            m[(n, n)] = tl;
        }
        None => m[(n, n)] = 1.0,
    }
    let mut rhs = DVector::zeros(n + 1);
    rhs[n] = 1.0;
    let t = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| MemsError::Numerical("singular bordered tangent system".into()))?;
    let tu: Vec<f64> = t.as_slice()[..n].to_vec();
    let norm = (weighted_dot(&tu, &tu) + t[n] * t[n]).sqrt();
    Ok((tu.iter().map(|v| v / norm).collect(), t[n] / norm))
}

/// Follows the steady branch from `lambda_start` (Newton from `U = 0`).
pub fn continue_branch(model: &Model, options: &ContinuationOptions) -> Result<Branch> {
    if !(options.step > 0.0) || !(options.max_step >= options.step) {
        return Err(MemsError::Argument(format!(
            "need 0 < step <= max_step, got step = {}, max_step = {}",
            options.step, options.max_step
        )));
    }
    let n = model.n();
    let first = newton_steady(model, options.lambda_start, &vec![0.0; n])?;
    if options.arclength {
        arclength_branch(model, options, first)
    } else {
        natural_branch(model, options, first)
    }
}

fn natural_branch(model: &Model, options: &ContinuationOptions, first: BranchPoint) -> Result<Branch> {
    let mut points = vec![first];
    let mut dl = options.step;
    let termination = loop {
        if points.len() >= options.max_points {
            break BranchTermination::MaxPoints;
        }
        if dl < MIN_STEP {
            break BranchTermination::StepUnderflow { step: dl };
        }
        let last = points.last().unwrap();
        // Secant predictor.
        let guess: Vec<f64> = if points.len() >= 2 {
            let prev = &points[points.len() - 2];
            let r = dl / (last.lambda - prev.lambda);
            last.u.iter().zip(&prev.u).map(|(a, b)| a + r * (a - b)).collect()
        } else {
            last.u.clone()
        };
        let guess = if guess.iter().all(|&v| 1.0 + v > model.params.kappa_stop) {
            guess
        } else {
            last.u.clone()
        };
        match newton_steady(model, last.lambda + dl, &guess) {
            Ok(mut p) => {
                let du: Vec<f64> = p.u.iter().zip(&last.u).map(|(a, b)| a - b).collect();
                p.s = last.s + (weighted_dot(&du, &du) + dl * dl).sqrt();
                let gap = p.min_gap;
                points.push(p);
                if gap < options.min_gap_stop {
                    break BranchTermination::GapLimit { min_gap: gap };
                }
                dl = (dl * 1.5).min(options.max_step);
            }
            Err(MemsError::Convergence { .. }) | Err(MemsError::Touchdown { .. }) | Err(MemsError::Numerical(_)) => {
                dl *= 0.5;
            }
            Err(e) => return Err(e),
        }
    };
    let fold = fold_estimate(&points, false);
    Ok(Branch {
        points,
        fold,
        termination,
    })
}

struct Corrected {
    u: Vec<f64>,
    lambda: f64,
    iterations: usize,
}

/// Newton on the extended system with the arclength constraint
/// `<t_U, U - U0>_w + t_lambda (lambda - lambda0) = ds`.
#[allow(clippy::too_many_arguments)]
fn correct(
    model: &Model,
    u0: &[f64],
    l0: f64,
    tu: &[f64],
    tl: f64,
    ds: f64,
    jac0: &DMatrix<f64>,
    max_iters: usize,
) -> Result<Option<Corrected>> {
    let n = u0.len();
    let tol = model.params.tol_newton;
    let mut u: Vec<f64> = u0.iter().zip(tu).map(|(a, t)| a + ds * t).collect();
    let mut l = l0 + ds * tl;
    let mut jac = jac0.clone();
    let mut age = 0;
    let mut prev_rn = f64::INFINITY;
    for it in 0..=max_iters {
        if u.iter().any(|&v| 1.0 + v <= model.params.kappa_stop) || l < 0.0 {
            return Ok(None);
        }
        let r = match steady_residual(model, l, &u) {
            Ok(r) => r,
            Err(MemsError::Touchdown { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        let du: Vec<f64> = u.iter().zip(u0).map(|(a, b)| a - b).collect();
        let c = weighted_dot(tu, &du) + tl * (l - l0) - ds;
        let rn = model.grid.l2_norm(&r);
        let floor = residual_floor(model, &u);
        // Past the first update a stalled residual at the rounding floor is
        // as converged as it gets.
        let stalled = it > 0 && rn > 0.5 * prev_rn && rn <= floor && c.abs() <= floor;
        if (rn <= tol && c.abs() <= tol) || stalled {
            return Ok(Some(Corrected {
                u,
                lambda: l,
                iterations: it,
            }));
        }
        if it == max_iters {
            break;
        }
        prev_rn = rn;
        if age >= JACOBIAN_REFRESH {
            jac = match steady_jacobian(model, l, &u) {
                Ok((j, _)) => j,
                Err(MemsError::Touchdown { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            age = 0;
        }
        age += 1;
        let g = model.potential.g(&u)?;
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&jac);
        for i in 0..n {
            m[(i, n)] = g[i];
            m[(n, i)] = tu[i] / n as f64;
        }
        m[(n, n)] = tl;
        let mut rhs = DVector::from_iterator(n + 1, r.iter().copied().chain(std::iter::once(c)));
        rhs.neg_mut();
        let Some(d) = m.lu().solve(&rhs) else {
            return Ok(None);
        };
        u.iter_mut().zip(d.iter()).for_each(|(a, b)| *a += b);
        l += d[n];
    }
    Ok(None)
}

fn arclength_branch(model: &Model, options: &ContinuationOptions, first: BranchPoint) -> Result<Branch> {
    let (mut jac, g) = steady_jacobian(model, first.lambda, &first.u)?;
    let (mut tu, mut tl) = tangent(&jac, &g, None)?;
    let mut tl_history = vec![tl];
    let mut points = vec![first];
    let mut ds = options.step;
    let termination = loop {
        if points.len() >= options.max_points {
            break BranchTermination::MaxPoints;
        }
        if ds < MIN_STEP {
            break BranchTermination::StepUnderflow { step: ds };
        }
        let last = points.last().unwrap();
        let Some(c) = correct(model, &last.u, last.lambda, &tu, tl, ds, &jac, options.max_corrector_iters)?
        else {
            ds *= 0.5;
            continue;
        };
        let (j, g) = steady_jacobian(model, c.lambda, &c.u)?;
        let (ntu, ntl) = tangent(&j, &g, Some((&tu, tl)))?;
        let du: Vec<f64> = c.u.iter().zip(&last.u).map(|(a, b)| a - b).collect();
        let s = last.s + (weighted_dot(&du, &du) + (c.lambda - last.lambda).powi(2)).sqrt();
        let p = make_point(model, c.lambda, c.u, s, &j, c.iterations)?;
        let (gap, lam) = (p.min_gap, p.lambda);
        points.push(p);
        jac = j;
        tu = ntu;
        tl = ntl;
        tl_history.push(tl);
        if gap < options.min_gap_stop {
            break BranchTermination::GapLimit { min_gap: gap };
        }
        if lam < options.lambda_start {
            break BranchTermination::LambdaLimit { lambda: lam };
        }
        if c.iterations <= 5 {
            ds = (ds * 1.5).min(options.max_step);
        }
    };
    let turned = tl_history.windows(2).any(|w| w[0] > 0.0 && w[1] <= 0.0);
    let fold = fold_estimate(&points, turned);
    Ok(Branch {
        points,
        fold,
        termination,
    })
}

/// Steady states at the given voltages (sorted ascending), each Newton
/// solve warm-started from the previous one.
pub fn steady_sweep(model: &Model, lambdas: &[f64]) -> Result<Vec<BranchPoint>> {
    let mut ls = lambdas.to_vec();
    ls.sort_by(f64::total_cmp);
    let mut u = vec![0.0; model.n()];
    let mut out = Vec::with_capacity(ls.len());
    for l in ls {
        let p = newton_steady(model, l, &u)?;
        u = p.u.clone();
        out.push(p);
    }
    Ok(out)
}

/// Maximum of `lambda` over the branch, refined by a parabola through the
/// neighbouring points in the arclength coordinate.
pub fn fold_estimate(points: &[BranchPoint], turned: bool) -> Option<FoldEstimate> {
    let (k, pk) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.lambda.total_cmp(&b.1.lambda))?;
    let mut refined = pk.lambda;
    let mut s_fold = pk.s;
    if k > 0 && k + 1 < points.len() {
        let (s0, s1, s2) = (points[k - 1].s, pk.s, points[k + 1].s);
        let (l0, l1, l2) = (points[k - 1].lambda, pk.lambda, points[k + 1].lambda);
        let d01 = (l1 - l0) / (s1 - s0);
        let d12 = (l2 - l1) / (s2 - s1);
        let a = (d12 - d01) / (s2 - s0);
        if a < 0.0 {
            let b = d01 - a * (s0 + s1);
            let sv = -b / (2.0 * a);
            if sv > s0 && sv < s2 {
                refined = l1 + d01 * (sv - s1) + a * (sv - s0) * (sv - s1);
                s_fold = sv;
            }
        }
    }
    Some(FoldEstimate {
        lambda_max: pk.lambda,
        lambda_refined: refined.max(pk.lambda),
        index: k,
        s: s_fold,
        min_gap: pk.min_gap,
        turned,
    })
}

/// Writes `s,lambda,min_gap,sup_norm,stability,residual`.
pub fn branch_csv(branch: &Branch) -> String {
    let mut out = String::from("s,lambda,min_gap,sup_norm,stability,residual\n");
    for p in &branch.points {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}\n",
            p.s,
            p.lambda,
            p.min_gap,
            p.sup_norm,
            p.stability.label(),
            p.residual
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRow {
    pub s: f64,
    pub lambda: f64,
    pub min_gap: f64,
    pub sup_norm: f64,
    pub stability: super::Stability,
    pub residual: f64,
}

/// Parses the output of [`branch_csv`].
pub fn parse_branch_csv(text: &str) -> Result<Vec<BranchRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "s,lambda,min_gap,sup_norm,stability,residual" {
        return Err(MemsError::Argument(format!("unexpected branch header {header:?}")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            let bad = || MemsError::Argument(format!("malformed branch row {}: {l:?}", i + 2));
            if f.len() != 6 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(BranchRow {
                s: num(f[0])?,
                lambda: num(f[1])?,
                min_gap: num(f[2])?,
                sup_norm: num(f[3])?,
                stability: super::Stability::parse(f[4]).ok_or_else(bad)?,
                residual: num(f[5])?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::Stability;

    fn point(s: f64, lambda: f64) -> BranchPoint {
        BranchPoint {
            lambda,
            u: vec![],
            min_gap: 0.5,
            sup_norm: 0.5,
            s,
            stability: Stability::Stable,
            residual: 0.0,
            min_eig: 1.0,
            iterations: 0,
        }
    }

    #[test]
    fn parabola_vertex_recovered() {
        let pts: Vec<_> = [0.0, 1.0, 2.5, 3.0, 4.0]
            .iter()
            .map(|&s| point(s, 5.0 - (s - 2.2f64).powi(2)))
            .collect();
        let f = fold_estimate(&pts, true).unwrap();
        assert_eq!(f.index, 2);
        assert!((f.lambda_refined - 5.0).abs() < 1e-12);
        assert!((f.s - 2.2).abs() < 1e-12);
    }

    #[test]
    fn monotone_branch_has_no_refinement() {
        let pts: Vec<_> = (0..4).map(|k| point(k as f64, k as f64)).collect();
        let f = fold_estimate(&pts, false).unwrap();
        assert_eq!(f.lambda_refined, 3.0);
        assert!(!f.turned);
    }

    #[test]
    fn csv_round_trip() {
        let b = Branch {
            points: vec![point(0.1, 1.0 / 3.0), point(0.7, std::f64::consts::PI)],
            fold: None,
            termination: BranchTermination::MaxPoints,
        };
        let rows = parse_branch_csv(&branch_csv(&b)).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].lambda, 1.0 / 3.0);
        assert_eq!(rows[1].lambda, std::f64::consts::PI);
        assert_eq!(rows[1].s, 0.7);
    }
}
