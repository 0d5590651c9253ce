//! Time stepping against scalar ODE solutions and structural properties.

use memsdyn::dynamics::{detect_touchdown, run_trajectory, step_wave, RunOptions, Termination};
use memsdyn::{Model, ModelParams, PlateState};

fn params() -> ModelParams {
    ModelParams {
        nx: 31,
        neta: 15,
        ..Default::default()
    }
}

/// Solution of `gamma^2 z'' + z' + mu z = 0`, `z(0) = 1`, `z'(0) = 0`, by
/// complex characteristic roots.
fn mode(gamma: f64, mu: f64, t: f64) -> f64 {
    let g2 = gamma * gamma;
    let disc = 1.0 - 4.0 * g2 * mu;
    let (re, im) = (-1.0 / (2.0 * g2), disc.abs().sqrt() / (2.0 * g2));
    if disc < 0.0 {
        // z = Re(c e^{r t}) with r = re + i im and c = 1 - i re/im
        let (s, c) = (im * t).sin_cos();
        (re * t).exp() * (c - re / im * s)
    } else {
        let (r1, r2) = (re + im, re - im);
        (r2 * (r1 * t).exp() - r1 * (r2 * t).exp()) / (r2 - r1)
    }
}

#[test]
fn single_mode_wave_matches_ode_at_second_order() {
    for gamma in [0.05, 0.2, 1.0] {
        let mut errs = Vec::new();
        for dt in [2e-3, 1e-3, 5e-4] {
            let m = Model::new(ModelParams {
                gamma,
                lambda: 0.0,
                dt,
                t_end: 0.5,
                // compare at the same instants for every step size
                ledger_stride: (0.01 / dt).round() as usize,
                ..params()
            })
            .unwrap();
            let e1 = m.norms.eigenvector(0);
            let tr = run_trajectory(&m, &e1, &vec![0.0; m.n()], RunOptions::default()).unwrap();
            let mu = m.norms.mu1();
            let worst = tr
                .record
                .snapshots
                .iter()
                .map(|(t, u)| (m.norms.coefficients(u).unwrap()[0] - mode(gamma, mu, *t)).abs())
                .fold(0.0, f64::max);
            errs.push(worst);
        }
        for w in errs.windows(2) {
            assert!((w[0] / w[1]).log2() > 1.8, "gamma {gamma}: {errs:?}");
        }
    }
}

#[test]
fn even_data_stay_even() {
    let m = Model::new(ModelParams {
        lambda: 2.0,
        t_end: 0.3,
        ..params()
    })
    .unwrap();
    let u0 = m.grid.sample(|x| -0.05 * (1.0 - x * x).powi(2));
    let tr = run_trajectory(&m, &u0, &vec![0.0; m.n()], RunOptions::default()).unwrap();
    for (_, u) in &tr.record.snapshots {
        let n = u.len();
        let asym = (0..n).map(|i| (u[i] - u[n - 1 - i]).abs()).fold(0.0, f64::max);
        assert!(asym <= 1e-10, "asymmetry {asym}");
    }
}

#[test]
fn dissipation_increases_while_moving() {
    let m = Model::new(ModelParams {
        lambda: 0.0,
        t_end: 0.2,
        ledger_stride: 1,
        ..params()
    })
    .unwrap();
    let u0 = m.grid.sample(|x| 0.05 * (1.0 - x * x).powi(2));
    let tr = run_trajectory(&m, &u0, &vec![0.0; m.n()], RunOptions::default()).unwrap();
    for w in tr.ledger.rows.windows(2).skip(1) {
        assert!(w[1].dissipation > w[0].dissipation);
    }
}

#[test]
fn small_gamma_does_not_amplify() {
    let m = Model::new(ModelParams {
        gamma: 1e-3,
        lambda: 0.0,
        ..params()
    })
    .unwrap();
    let mut s = PlateState::new(m.grid.sample(|x| 0.1 * (1.0 - x * x).powi(2)), vec![0.0; m.n()], 0.0);
    let mut prev = m.norms.fractional_norm(&s.u, 1.0).unwrap();
    for _ in 0..200 {
        s = step_wave(&m, &s).unwrap();
        let now = m.norms.fractional_norm(&s.u, 1.0).unwrap();
        assert!(now <= prev * (1.0 + 1e-12));
        prev = now;
    }
}

#[test]
fn stride_doubling_halves_ledger_rows() {
    let rows = |stride| {
        let m = Model::new(ModelParams {
            lambda: 0.5,
            t_end: 0.2,
            ledger_stride: stride,
            ..params()
        })
        .unwrap();
        let z = vec![0.0; m.n()];
        run_trajectory(&m, &z, &z, RunOptions::default()).unwrap().ledger.rows.len() - 1
    };
    assert_eq!(rows(5), 2 * rows(10));
}

#[test]
fn touchdown_time_is_stable_under_threshold_halving() {
    let run = |kappa_stop| {
        let m = Model::new(ModelParams {
            lambda: 50.0,
            kappa_stop,
            ledger_stride: 1,
            ..params()
        })
        .unwrap();
        let z = vec![0.0; m.n()];
        let tr = run_trajectory(&m, &z, &z, RunOptions::default()).unwrap();
        assert!(matches!(tr.record.termination, Termination::Touchdown { .. }));
        detect_touchdown(&tr.record).unwrap()
    };
    let (a, b) = (run(0.01), run(0.005));
    assert!((a.t_c - b.t_c).abs() <= a.interval.max(b.interval));
    assert_eq!(a.x, 0.0);
}

#[test]
fn small_voltage_stays_in_the_admissible_set() {
    let m = Model::new(ModelParams {
        lambda: 0.1,
        t_end: 2.0,
        ..params()
    })
    .unwrap();
    let u0 = m.grid.sample(|x| -0.01 * (1.0 - x * x).powi(2));
    let tr = run_trajectory(&m, &u0, &vec![0.0; m.n()], RunOptions::default()).unwrap();
    assert_eq!(tr.record.termination, Termination::Completed);
    assert!(tr.record.samples.iter().all(|s| s.in_s_alpha));
    assert!(detect_touchdown(&tr.record).is_none());
}
