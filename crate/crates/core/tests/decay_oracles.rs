//! Lyapunov functionals and decay certificates against closed forms.

use memsdyn::decay::{
    decay_constants, evaluate_decay_trace, minimal_existence_time, smallness_conditions,
    verify_decay_inequality, LyapunovConfig, Surrogates,
};
use memsdyn::dynamics::{run_trajectory, RunOptions};
use memsdyn::{MemsError, Model, ModelParams};

const KEEP: RunOptions = RunOptions {
    snapshot_every: 1,
    keep_velocities: true,
};

fn model(gamma: f64, lambda: f64, t_end: f64) -> Model {
    Model::new(ModelParams {
        gamma,
        lambda,
        t_end,
        nx: 31,
        neta: 15,
        ..Default::default()
    })
    .unwrap()
}

/// `2 min(-Re r)` over the roots of `gamma^2 r^2 + r + mu = 0`.
fn energy_rate(gamma: f64, mu: f64) -> f64 {
    let g2 = gamma * gamma;
    let disc = 1.0 - 4.0 * g2 * mu;
    if disc < 0.0 {
        1.0 / g2
    } else {
        (1.0 - disc.sqrt()) / g2
    }
}

#[test]
fn rest_state_has_zero_functionals() {
    let m = model(0.5, 0.0, 0.2);
    let z = vec![0.0; m.n()];
    let config = decay_constants(1.0).unwrap();
    let tr = run_trajectory(&m, &z, &z, KEEP).unwrap();
    let trace = evaluate_decay_trace(&tr.record, &z, &config, &m).unwrap();
    assert!(trace.samples.iter().all(|s| s.e == 0.0 && s.f == 0.0 && s.g == 0.0));
    assert!(trace.violations.is_empty());
    assert!(verify_decay_inequality(&trace, &config).passed);
}

#[test]
fn initial_functionals_of_a_pure_velocity_mode() {
    let gamma = 0.5;
    let m = model(gamma, 0.0, 0.05);
    let z = vec![0.0; m.n()];
    let e1 = m.norms.eigenvector(0);
    let config = decay_constants(1.0).unwrap();
    let tr = run_trajectory(&m, &z, &e1, KEEP).unwrap();
    let trace = evaluate_decay_trace(&tr.record, &z, &config, &m).unwrap();
    let s0 = trace.samples[0];
    // ||e1||_(alpha)^2 = mu1^alpha for a grid-normalised eigenvector
    let expected = gamma * gamma * m.norms.mu1().powf(m.norms.alpha());
    assert!((s0.e - expected).abs() <= 1e-10 * expected, "{} vs {expected}", s0.e);
    assert!(s0.f.abs() <= 1e-12);
    assert!((s0.g - s0.e).abs() <= 1e-12 * expected);
}

#[test]
fn homogeneous_rate_matches_characteristic_roots() {
    for (gamma, t_end) in [(1.0, 5.0), (0.25, 1.0)] {
        let m = model(gamma, 0.0, t_end);
        let z = vec![0.0; m.n()];
        let e1 = m.norms.eigenvector(0);
        let config = decay_constants(1.0).unwrap();
        let tr = run_trajectory(&m, &z, &e1, KEEP).unwrap();
        let trace = evaluate_decay_trace(&tr.record, &z, &config, &m).unwrap();
        let rep = verify_decay_inequality(&trace, &config);
        assert!(rep.homogeneous && rep.passed);
        let rate = rep.fitted_rate.unwrap();
        let oracle = energy_rate(gamma, m.norms.mu1());
        assert!((rate - oracle).abs() <= 0.02 * oracle, "gamma {gamma}: {rate} vs {oracle}");
    }
}

#[test]
fn envelope_holds_under_constant_forcing() {
    // with lambda = 0 the shifted forcing is the constant -A u0
    let m = model(0.5, 0.0, 2.0);
    let u0 = m.grid.sample(|x| 0.05 * (1.0 - x * x).powi(2));
    let u1 = m.grid.sample(|x| 0.2 * (1.0 - x * x).powi(2));
    let config = decay_constants(1.0).unwrap();
    let tr = run_trajectory(&m, &u0, &u1, KEEP).unwrap();
    let trace = evaluate_decay_trace(&tr.record, &u0, &config, &m).unwrap();
    let f0 = trace.samples[0].forcing_norm;
    assert!(f0 > 0.0);
    assert!(trace.samples.iter().all(|s| (s.forcing_norm - f0).abs() <= 1e-12 * f0));
    let rep = verify_decay_inequality(&trace, &config);
    assert!(rep.passed, "failures at {:?}", rep.failures);
    assert!(!rep.homogeneous && rep.fitted_rate.is_none());
    assert!(trace.violations.is_empty());
}

#[test]
fn damping_above_gamma1_is_rejected() {
    let m = model(1.5, 0.0, 0.01);
    let z = vec![0.0; m.n()];
    let tr = run_trajectory(&m, &z, &z, KEEP).unwrap();
    let err = evaluate_decay_trace(&tr.record, &z, &decay_constants(1.0).unwrap(), &m).unwrap_err();
    assert!(matches!(err, MemsError::Argument(_)));
}

#[test]
fn omega_decreases_with_gamma1() {
    let omegas: Vec<f64> = (1..=40)
        .map(|k| decay_constants(0.1 * k as f64).unwrap().omega)
        .collect();
    for w in omegas.windows(2) {
        assert!(w[1] <= w[0] && w[1] > 0.0);
    }
    // the b = min{...} formula at gamma1 = 1 and 2
    let one = LyapunovConfig::new(1.0).unwrap();
    assert!((one.b - 0.5).abs() < 1e-15 && (one.omega - 0.2).abs() < 1e-15);
    let two = LyapunovConfig::new(2.0).unwrap();
    assert!((two.b - 0.2).abs() < 1e-15 && (two.omega - 1.0 / 12.0).abs() < 1e-15);
}

#[test]
fn existence_time_shrinks_with_larger_data() {
    let m = model(0.2, 0.5, 1.0);
    let config = decay_constants(1.0).unwrap();
    let s = Surrogates {
        m: 10.0,
        c3: 0.5,
        c4: 1.0,
        provenance: Vec::new(),
    };
    let u1 = vec![0.0; m.n()];
    let u0 = m.grid.sample(|x| -0.01 * (1.0 - x * x).powi(4));
    let u0x2: Vec<f64> = u0.iter().map(|v| 2.0 * v).collect();
    let a = smallness_conditions(&u0, &u1, &m, &config, &s).unwrap();
    let b = smallness_conditions(&u0x2, &u1, &m, &config, &s).unwrap();
    assert!(a.t_hat.is_finite() && b.t_hat.is_finite());
    assert!(b.t_hat < a.t_hat);
    assert!(b.bracket > a.bracket);
    // inversion: bracket (1 - e^{-omega T}) = threshold
    let back = -a.bracket * (-config.omega * a.t_hat).exp_m1();
    assert!((back - a.threshold).abs() <= 1e-12 * a.threshold);
    assert_eq!(minimal_existence_time(1.0, 2.0, 0.2), f64::INFINITY);
}

#[test]
fn nonpositive_surrogates_are_rejected() {
    let m = model(0.2, 0.5, 1.0);
    let config = decay_constants(1.0).unwrap();
    let z = vec![0.0; m.n()];
    for (mm, c3, c4) in [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, 0.0)] {
        let s = Surrogates {
            m: mm,
            c3,
            c4,
            provenance: Vec::new(),
        };
        let err = smallness_conditions(&z, &z, &m, &config, &s).unwrap_err();
        assert!(matches!(err, MemsError::Parameter(_)));
    }
}

#[test]
fn sampled_surrogates_are_seeded() {
    let m = model(0.2, 0.5, 1.0);
    let config = decay_constants(1.0).unwrap();
    let a = Surrogates::estimate(&m, &config, 10, 3).unwrap();
    let b = Surrogates::estimate(&m, &config, 10, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.c3 > 0.0 && a.c4 >= 1.0 && a.m > 0.0);
    assert_eq!(a.provenance.len(), 3);
}
