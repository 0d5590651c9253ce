//! Drives the simulate command from a configuration document and reads the
//! emitted trajectory back.

use memsdyn::experiments::output::parse_numeric_csv;
use memsdyn::experiments::{cmd_simulate, RunConfig};

const CONFIG: &str = "
# a moderately driven plate released from a small bump
lambda = 2.0
gamma = 0.3
t_end = 0.5
stride = 5
initial_condition = polynomial_bump -0.05
";

fn main() -> memsdyn::Result<()> {
    let cfg = RunConfig::parse(CONFIG)?;
    let out = std::env::temp_dir().join("memsdyn-run-config");
    let summary = cmd_simulate(&cfg, &out)?;
    println!("{summary:?}");
    let text = std::fs::read_to_string(out.join("trajectory.csv"))?;
    let (header, rows) = parse_numeric_csv(&text)?;
    println!("{} rows of {:?}", rows.len(), header);
    if let Some(last) = rows.last() {
        println!("final sample: t = {}, min gap = {}", last[0], last[1]);
    }
    println!("outputs in {}", out.display());
    Ok(())
}
