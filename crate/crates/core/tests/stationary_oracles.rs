//! Steady states, branch continuation and the pull-in bisection.

use memsdyn::dynamics::{run_trajectory, RunOptions};
use memsdyn::stationary::{
    branch_csv, continue_branch, newton_steady, parse_branch_csv, pull_in_bisection,
    residual_floor, steady_residual, BranchTermination, ContinuationOptions, Stability,
};
use memsdyn::{MemsError, Model, ModelParams};

fn small(lambda: f64) -> Model {
    Model::new(ModelParams {
        lambda,
        nx: 31,
        neta: 15,
        ..Default::default()
    })
    .unwrap()
}

#[test]
fn newton_steady_state_at_low_voltage() {
    let m = Model::new(ModelParams {
        gamma: 0.0,
        lambda: 0.2,
        dt: 0.01,
        t_end: 3.0,
        ledger_stride: 100,
        ..Default::default()
    })
    .unwrap();
    let z = vec![0.0; m.n()];
    let p = newton_steady(&m, 0.2, &z).unwrap();
    assert!(p.residual <= 1e-10, "residual {}", p.residual);
    assert!(p.u.iter().all(|&v| -1.0 < v && v < 0.0));
    assert_eq!(p.stability, Stability::Stable);

    // recomputed independently of the solver's bookkeeping
    let r = steady_residual(&m, 0.2, &p.u).unwrap();
    assert!(m.grid.l2_norm(&r) <= 1e-10);

    let n = p.u.len();
    let asym = (0..n).map(|i| (p.u[i] - p.u[n - 1 - i]).abs()).fold(0.0, f64::max);
    assert!(asym <= 1e-9, "asymmetry {asym}");

    // the gradient flow relaxes onto the same state
    let tr = run_trajectory(&m, &z, &z, RunOptions::default()).unwrap();
    let d = tr
        .record
        .final_state
        .u
        .iter()
        .zip(&p.u)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(d <= 1e-6, "max |U - u(T)| = {d}");
}

#[test]
fn zero_voltage_gives_the_flat_plate() {
    let m = small(0.0);
    let p = newton_steady(&m, 0.0, &vec![0.0; m.n()]).unwrap();
    assert!(p.u.iter().all(|&v| v == 0.0));
    assert_eq!(p.min_gap, 1.0);
}

#[test]
fn negative_voltage_is_rejected() {
    let m = small(0.0);
    let err = newton_steady(&m, -1.0, &vec![0.0; m.n()]).unwrap_err();
    assert!(matches!(err, MemsError::Parameter(_)));
}

#[test]
fn short_branch_is_consistent() {
    let m = small(0.0);
    let opts = ContinuationOptions {
        max_points: 12,
        ..Default::default()
    };
    let b = continue_branch(&m, &opts).unwrap();
    assert_eq!(b.termination, BranchTermination::MaxPoints);
    assert_eq!(b.points.len(), 12);
    assert_eq!(b.points[0].lambda, 0.0);
    for w in b.points.windows(2) {
        // the gap closes and the arclength grows monotonically along the branch
        assert!(w[1].min_gap < w[0].min_gap);
        assert!(w[1].s > w[0].s);
    }
    for p in &b.points {
        let r = m.grid.l2_norm(&steady_residual(&m, p.lambda, &p.u).unwrap());
        let floor = residual_floor(&m.with_lambda(p.lambda), &p.u);
        assert!(r <= floor.max(m.params.tol_newton), "lambda {}: {r} > {floor}", p.lambda);
    }
    let rows = parse_branch_csv(&branch_csv(&b)).unwrap();
    assert_eq!(rows.len(), b.points.len());
    for (row, p) in rows.iter().zip(&b.points) {
        assert_eq!(row.lambda, p.lambda);
        assert_eq!(row.min_gap, p.min_gap);
        assert_eq!(row.stability, p.stability);
    }
}

#[test]
fn bisection_halves_the_bracket() {
    let m = Model::new(ModelParams {
        nx: 31,
        neta: 15,
        ..Default::default()
    })
    .unwrap();
    let z = vec![0.0; m.n()];
    let r = pull_in_bisection(&m, 0.0, 50.0, 0.1, 2.0, &z, &z).unwrap();
    assert_eq!(r.widths.len(), r.iterations);
    let mut prev = 50.0;
    for &w in &r.widths {
        assert!((w - 0.5 * prev).abs() <= 1e-12 * prev);
        prev = w;
    }
    assert!(r.lambda_hi - r.lambda_lo <= 2.0);
    assert!(r.witness_lo.completed() && !r.witness_hi.completed());
    assert!(r.witness_hi.t_c.is_some());
}

#[test]
fn bisection_reports_the_failing_endpoint() {
    let m = small(0.0);
    let z = vec![0.0; m.n()];
    match pull_in_bisection(&m, 50.0, 60.0, 0.1, 1.0, &z, &z) {
        Err(MemsError::Argument(msg)) => assert!(msg.contains("lambda_lo"), "{msg}"),
        other => panic!("expected an argument error, got {other:?}"),
    }
    match pull_in_bisection(&m, 0.0, 0.5, 0.1, 0.1, &z, &z) {
        Err(MemsError::Argument(msg)) => assert!(msg.contains("lambda_hi"), "{msg}"),
        other => panic!("expected an argument error, got {other:?}"),
    }
}
