//! Damped trajectories converging to the parabolic evolution as the
//! inertia coefficient shrinks.

use memsdyn::experiments::limit_study;
use memsdyn::{Model, ModelParams};

fn main() -> memsdyn::Result<()> {
    let model = Model::new(ModelParams {
        lambda: 0.5,
        eps: 0.3,
        ..Default::default()
    })?;
    let u0 = model.grid.sample(|x| -0.1 * (1.0 - x * x).powi(2));
    let u1 = vec![0.0; model.n()];
    let gammas = [0.4, 0.2, 0.1, 0.05];
    let rep = limit_study(&model, &gammas, &u0, &u1, 20, 1)?;
    println!("{:>6} {:>12} {:>12} {:>10}", "gamma", "err", "phi err", "ratio");
    for m in &rep.members {
        println!("{:>6} {:>12.4e} {:>12.4e} {:>10.4}", m.gamma, m.err, m.potential_err, m.lipschitz_ratio);
    }
    println!("orders {:?}", rep.err_orders);
    println!("sampled C0 = {:.4}, ratio check ok: {}", rep.lipschitz_c0, rep.lipschitz_ok);
    Ok(())
}
