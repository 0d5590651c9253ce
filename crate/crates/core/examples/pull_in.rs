//! Dynamic pull-in voltage by bisection, next to the static fold.

use memsdyn::stationary::{continue_branch, pull_in_bisection, ContinuationOptions};
use memsdyn::{Model, ModelParams};

fn main() -> memsdyn::Result<()> {
    let model = Model::new(ModelParams {
        nx: 31,
        neta: 15,
        ..Default::default()
    })?;
    let z = vec![0.0; model.n()];
    let res = pull_in_bisection(&model, 0.0, 20.0, 2.0, 0.05, &z, &z)?;
    println!(
        "dynamic threshold in [{:.4}, {:.4}] after {} bisections",
        res.lambda_lo, res.lambda_hi, res.iterations
    );
    println!("  below: {:?}", res.witness_lo);
    println!("  above: {:?}", res.witness_hi);
    let branch = continue_branch(&model, &ContinuationOptions::default())?;
    println!("static fold lambda_s^h = {:.4}", branch.lambda_max());
    Ok(())
}
