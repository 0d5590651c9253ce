//! Principal eigenvalue of the clamped plate operator under refinement and
//! the spectral fractional norms built on it.

use memsdyn::{FractionalNormContext, Grid1D, PlateOperator};

fn main() -> memsdyn::Result<()> {
    // clamped beam: k1 solves cos k cosh k = 1; on (-1, 1) the scale is 2
    let k1: f64 = 4.730040744862704;
    let exact = k1.powi(4) / 16.0;
    println!("{:>6} {:>18} {:>12}", "n", "mu1", "rel. error");
    for n in [31, 63, 127, 255] {
        let grid = Grid1D::new(n)?;
        let op = PlateOperator::assemble(&grid, 1.0, 0.0)?;
        let pair = op.principal_eigenpair(1e-12, 500)?;
        println!("{n:>6} {:>18.12} {:>12.3e}", pair.value, (pair.value - exact) / exact);
    }

    let grid = Grid1D::new(63)?;
    let op = PlateOperator::assemble(&grid, 1.0, 0.0)?;
    let ctx = FractionalNormContext::new(&op, 0.125, 1e-10)?;
    let u = grid.sample(|x| -0.1 * (1.0 - x * x).powi(2));
    for s in [0.0, 0.125, 1.0, 1.125, 2.125] {
        println!("||u||_({s}) = {:.6e}", ctx.fractional_norm(&u, s)?);
    }
    let adm = ctx.check_s_alpha(&u, 0.1)?;
    println!("in S_alpha(0.1): {} (norm margin {:.3e}, gap margin {:.3e})", adm.member, adm.norm_margin, adm.gap_margin);
    Ok(())
}
