//! The discrete energy equality along a damped trajectory, and its residual
//! under time-step halving.

use memsdyn::dynamics::{run_trajectory, RunOptions};
use memsdyn::{Model, ModelParams};

fn main() -> memsdyn::Result<()> {
    let model = Model::new(ModelParams {
        gamma: 0.2,
        lambda: 0.3,
        eps: 0.3,
        ..Default::default()
    })?;
    let u0 = model.grid.sample(|x| -0.05 * (1.0 - x * x).powi(2));
    let u1 = vec![0.0; model.n()];
    let tr = run_trajectory(&model, &u0, &u1, RunOptions::default())?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>12} {:>12}", "t", "Em", "Ee", "kinetic", "dissip.", "R");
    for r in tr.ledger.rows.iter().step_by(10) {
        println!(
            "{:>6.3} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.3e}",
            r.t, r.em, r.ee, r.kinetic, r.dissipation, r.residual
        );
    }

    println!("\nlambda = 0, max |R| under halving:");
    let mut prev: Option<f64> = None;
    for dt in [2e-3, 1e-3, 5e-4] {
        let m = Model::new(ModelParams {
            gamma: 0.2,
            lambda: 0.0,
            dt,
            ..Default::default()
        })?;
        let u0 = m.grid.sample(|x| 0.1 * (1.0 - x * x).powi(3));
        let r = run_trajectory(&m, &u0, &vec![0.0; m.n()], RunOptions::default())?
            .ledger
            .max_abs_residual();
        match prev {
            Some(p) => println!("  dt = {dt:.1e}: {r:.4e} (order {:.3})", (p / r).log2()),
            None => println!("  dt = {dt:.1e}: {r:.4e}"),
        }
        prev = Some(r);
    }
    Ok(())
}
