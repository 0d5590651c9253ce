//! Configuration parsing, output files and the `mems` binary.

use std::path::Path;
use std::process::Command;

use memsdyn::experiments::output::parse_numeric_csv;
use memsdyn::experiments::{cmd_limit_study, cmd_simulate, RunConfig};
use memsdyn::stationary::parse_branch_csv;
use memsdyn::MemsError;

const SMALL: &str = "nx = 31\nneta = 15\n";

fn mems(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mems"))
        .args(args)
        .output()
        .expect("failed to launch mems")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, format!("{SMALL}{body}")).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn config_errors_carry_line_and_key() {
    let cases = [
        ("gamma = 0.1\ngamma = 0.2\n", 2, "gamma"),
        ("# comment\nwobble = 3\n", 2, "wobble"),
        ("dt = fast\n", 1, "dt"),
        ("nx 31\n", 1, ""),
    ];
    for (text, line, key) in cases {
        match RunConfig::parse(text) {
            Err(MemsError::Config { line: l, key: k, .. }) => {
                assert_eq!((l, k.as_str()), (line, key), "{text:?}");
            }
            other => panic!("{text:?}: expected a config error, got {other:?}"),
        }
    }
    // well-formed keys with invalid values fail validation
    assert!(matches!(RunConfig::parse("kappa_stop = 0.5\n"), Err(MemsError::Parameter(_))));
    let ok = RunConfig::parse("stride = 4 # trailing comment\nlambda = 0.3\n").unwrap();
    assert_eq!(ok.params.ledger_stride, 4);
    assert_eq!(ok.params.lambda, 0.3);
}

#[test]
fn simulate_at_rest_has_zero_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&format!("{SMALL}lambda = 0\nt_end = 0.1\n")).unwrap();
    let s = cmd_simulate(&cfg, dir.path()).unwrap();
    assert_eq!(s.termination, "completed");
    assert_eq!(s.max_abs_residual, 0.0);
    let (header, rows) =
        parse_numeric_csv(&std::fs::read_to_string(dir.path().join("ledger.csv")).unwrap()).unwrap();
    assert_eq!(header, ["t", "Em", "Ee", "kinetic", "dissipation", "residual"]);
    assert_eq!(rows.len(), s.ledger_rows);
    // the flat gap keeps its constant field energy; everything else vanishes
    let ee0 = rows[0][2];
    assert!(ee0 > 0.0);
    assert!(rows
        .iter()
        .all(|r| r[1] == 0.0 && r[2] == ee0 && r[3] == 0.0 && r[4] == 0.0 && r[5] == 0.0));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["schema_version"], 1);
    assert_eq!(summary["summary"]["termination"], "completed");
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "lambda = 1.5\nt_end = 0.2\ninitial_condition = polynomial_bump -0.05\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        let o = mems(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", jobs]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["trajectory.csv", "ledger.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn stride_flag_controls_ledger_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "lambda = 0.5\nt_end = 0.2\n");
    let rows = |stride: &str| {
        let out = dir.path().join(format!("s{stride}"));
        let o = mems(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--stride", stride]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(out.join("ledger.csv")).unwrap();
        parse_numeric_csv(&text).unwrap().1.len() - 1
    };
    assert_eq!(rows("5"), 2 * rows("10"));
}

#[test]
fn bad_config_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "not_a_key = 1\n");
    let o = mems(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not_a_key"));
}

#[test]
fn verify_quick_passes() {
    let o = mems(&["verify", "--level", "quick"]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(stdout.lines().count() >= 8);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
}

#[test]
fn limit_study_without_forcing_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&format!(
        "{SMALL}lambda = 0\nt_end = 0.1\ngamma_list = 0.2, 0.1\nlipschitz_samples = 2\n"
    ))
    .unwrap();
    let rep = cmd_limit_study(&cfg, dir.path()).unwrap();
    assert!(rep.zero_data);
    assert!(rep.members.iter().all(|m| m.err == 0.0 && m.potential_err == 0.0));
    assert!(dir.path().join("limit_study.csv").exists());
}

#[test]
fn continuation_writes_a_parsable_branch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "max_points = 6\n");
    let out = dir.path().join("branch");
    let o = mems(&["continuation", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_branch_csv(&std::fs::read_to_string(out.join("branch.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0].lambda, 0.0);
    assert!(out.join("fold.json").exists());
}
