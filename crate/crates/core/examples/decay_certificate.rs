//! Lyapunov functionals along homogeneous runs for shrinking damping
//! inertia, with the integrated decay bound and the smallness conditions.

use memsdyn::decay::{
    decay_constants, evaluate_decay_trace, smallness_conditions, verify_decay_inequality, Surrogates,
};
use memsdyn::dynamics::{run_trajectory, RunOptions};
use memsdyn::{Model, ModelParams};

fn main() -> memsdyn::Result<()> {
    let config = decay_constants(1.0)?;
    println!("gamma1 = 1: b = {}, omega = {}", config.b, config.omega);
    let opts = RunOptions {
        snapshot_every: 1,
        keep_velocities: true,
    };
    for gamma in [1.0, 0.25, 0.0625] {
        let model = Model::new(ModelParams {
            gamma,
            lambda: 0.0,
            t_end: 5.0,
            ..Default::default()
        })?;
        let z = vec![0.0; model.n()];
        let u1 = model.norms.eigenvector(0);
        let tr = run_trajectory(&model, &z, &u1, opts)?;
        let trace = evaluate_decay_trace(&tr.record, &z, &config, &model)?;
        let rep = verify_decay_inequality(&trace, &config);
        println!(
            "gamma = {gamma:<7} fitted rate {:>9.4}  envelope ok {}  sandwich violations {}",
            rep.fitted_rate.unwrap_or(f64::NAN),
            rep.passed,
            trace.violations.len()
        );
    }

    let model = Model::new(ModelParams {
        lambda: 0.05,
        ..Default::default()
    })?;
    let s = Surrogates::estimate(&model, &config, 50, 7)?;
    let u0 = model.grid.sample(|x| -0.001 * (1.0 - x * x).powi(2));
    let u1 = vec![0.0; model.n()];
    let rep = smallness_conditions(&u0, &u1, &model, &config, &s)?;
    println!("M = {:.3}, c3 = {:.4}, c4 = {:.4}", s.m, s.c3, s.c4);
    println!(
        "threshold {:.3e}, bracket {:.3e}, T_hat = {} (global: {})",
        rep.threshold, rep.bracket, rep.t_hat, rep.global_condition
    );
    for line in &s.provenance {
        println!("  {line}");
    }
    Ok(())
}
