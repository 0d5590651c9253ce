//! Steady states along the voltage: arclength continuation around the
//! fold, with the stability change across it.

use memsdyn::stationary::{continue_branch, ContinuationOptions};
use memsdyn::{Model, ModelParams};

fn main() -> memsdyn::Result<()> {
    let model = Model::new(ModelParams::default())?;
    let branch = continue_branch(&model, &ContinuationOptions::default())?;
    for p in &branch.points {
        println!(
            "s = {:7.4}  lambda = {:9.6}  min gap = {:8.5}  {:<12} min eig = {:10.4}",
            p.s,
            p.lambda,
            p.min_gap,
            p.stability.label(),
            p.min_eig
        );
    }
    if let Some(f) = branch.fold {
        println!("fold: lambda_s^h = {:.6} (parabola {:.6}) at min gap {:.4}", f.lambda_max, f.lambda_refined, f.min_gap);
    }
    println!("termination: {:?}", branch.termination);
    Ok(())
}
