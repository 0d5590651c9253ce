//! A strongly driven plate from rest pulls in: the run stops at the
//! touchdown guard and the contact time is extrapolated.

use memsdyn::dynamics::{detect_touchdown, run_trajectory, RunOptions};
use memsdyn::{Model, ModelParams};

fn main() -> memsdyn::Result<()> {
    let model = Model::new(ModelParams {
        lambda: 50.0,
        eps: 0.3,
        ledger_stride: 1,
        ..Default::default()
    })?;
    let z = vec![0.0; model.n()];
    let tr = run_trajectory(&model, &z, &z, RunOptions::default())?;
    for s in tr.record.samples.iter().rev().take(8).rev() {
        println!("t = {:.4}  min gap = {:.5}  max g = {:.4}", s.t, s.min_gap, s.g_sup);
    }
    println!("termination: {:?}", tr.record.termination);
    if let Some(est) = detect_touchdown(&tr.record) {
        println!("T_c ~ {:.6} at x = {:.4} (extrapolated over {:.1e})", est.t_c, est.x, est.interval);
    }
    Ok(())
}
