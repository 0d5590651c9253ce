use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use memsdyn::experiments::{self, RunConfig, VerifyLevel};
use memsdyn::MemsError;

#[derive(Parser)]
#[command(name = "mems", about = "Damped plate MEMS experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Ledger stride; overrides the config.
    #[arg(long)]
    stride: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    Simulate(Common),
    LimitStudy(Common),
    Continuation(Common),
    PullIn(Common),
    Decay(Common),
    Verify {
        #[arg(long, default_value = "quick")]
        level: String,
        #[command(flatten)]
        common: Common,
    },
}

fn load(c: &Common) -> Result<(RunConfig, PathBuf), MemsError> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = c.stride {
        cfg.params.ledger_stride = s;
        cfg.validate()?;
    }
    let out = c
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn print<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string_pretty(v).unwrap_or_default());
}

fn run(cli: Cli) -> Result<bool, MemsError> {
    match cli.command {
        Command::Simulate(c) => {
            let (cfg, out) = load(&c)?;
            print(&experiments::with_jobs(c.jobs, || experiments::cmd_simulate(&cfg, &out))??);
        }
        Command::LimitStudy(c) => {
            let (cfg, out) = load(&c)?;
            print(&experiments::with_jobs(c.jobs, || experiments::cmd_limit_study(&cfg, &out))??);
        }
        Command::Continuation(c) => {
            let (cfg, out) = load(&c)?;
            let (_, summary) = experiments::with_jobs(c.jobs, || experiments::cmd_continuation(&cfg, &out))??;
            print(&summary);
        }
        Command::PullIn(c) => {
            let (cfg, out) = load(&c)?;
            print(&experiments::with_jobs(c.jobs, || experiments::cmd_pull_in(&cfg, &out))??);
        }
        Command::Decay(c) => {
            let (cfg, out) = load(&c)?;
            let rep = experiments::with_jobs(c.jobs, || experiments::cmd_decay(&cfg, &out))??;
            print(&rep);
            return Ok(rep.passed);
        }
        Command::Verify { level, common } => {
            let level: VerifyLevel = level.parse()?;
            let rep = experiments::with_jobs(common.jobs, || experiments::cmd_verify(level))?;
            for c in &rep.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if let Some(out) = &common.out {
                experiments::output::write_json(out, "verify.json", &rep)?;
            }
            return Ok(rep.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
