//! Physical and numerical parameters shared by every module.

use crate::error::{MemsError, Result};

/// Model and discretisation parameters.
///
/// `alpha2` is the fractional index `2 alpha`; the spectral norms use
/// `alpha = alpha2 / 2` as the exponent offset.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub beta: f64,
    pub tau: f64,
    pub lambda: f64,
    pub eps: f64,
    pub alpha2: f64,
    pub kappa: f64,
    pub kappa_stop: f64,
    pub gamma1: f64,
    pub dt: f64,
    pub t_end: f64,
    pub tol_newton: f64,
    pub tol_linear: f64,
    /// Interior nodes of the plate grid.
    pub nx: usize,
    /// Interior nodes of the eta grid of the potential solve.
    pub neta: usize,
    /// Energy ledger is refreshed every `ledger_stride` steps.
    pub ledger_stride: usize,
    pub max_newton_iters: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            gamma: 0.2,
            beta: 1.0,
            tau: 0.0,
            lambda: 1.0,
            eps: 0.3,
            alpha2: 0.25,
            kappa: 0.1,
            kappa_stop: 0.01,
            gamma1: 1.0,
            dt: 1e-3,
            t_end: 1.0,
            tol_newton: 1e-10,
            tol_linear: 1e-10,
            nx: 63,
            neta: 31,
            ledger_stride: 10,
            max_newton_iters: 50,
        }
    }
}

impl ModelParams {
    pub fn alpha(&self) -> f64 {
        0.5 * self.alpha2
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(msg: String) -> Result<()> {
            Err(MemsError::Parameter(msg))
        }
        let finite = [
            ("gamma", self.gamma),
            ("beta", self.beta),
            ("tau", self.tau),
            ("lambda", self.lambda),
            ("eps", self.eps),
            ("alpha2", self.alpha2),
            ("kappa", self.kappa),
            ("kappa_stop", self.kappa_stop),
            ("gamma1", self.gamma1),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("tol_newton", self.tol_newton),
            ("tol_linear", self.tol_linear),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.gamma < 0.0 {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if self.beta <= 0.0 {
            return bad(format!("beta must be > 0, got {}", self.beta));
        }
        if self.tau < 0.0 {
            return bad(format!("tau must be >= 0, got {}", self.tau));
        }
        if self.lambda < 0.0 {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.eps < 0.0 {
            return bad(format!("eps must be >= 0, got {}", self.eps));
        }
        if !(self.alpha2 > 0.0 && self.alpha2 < 0.5) {
            return bad(format!("alpha2 must lie in (0, 1/2), got {}", self.alpha2));
        }
        if !(0.0 < self.kappa_stop && self.kappa_stop < self.kappa && self.kappa < 1.0) {
            return bad(format!(
                "need 0 < kappa_stop < kappa < 1, got kappa_stop = {}, kappa = {}",
                self.kappa_stop, self.kappa
            ));
        }
        if self.gamma1 <= 0.0 {
            return bad(format!("gamma1 must be > 0, got {}", self.gamma1));
        }
        if self.dt <= 0.0 || self.t_end <= 0.0 {
            return bad(format!(
                "dt and t_end must be > 0, got dt = {}, t_end = {}",
                self.dt, self.t_end
            ));
        }
        if self.tol_newton <= 0.0 || self.tol_linear <= 0.0 {
            return bad("tolerances must be > 0".into());
        }
        if self.nx < crate::grid::MIN_INTERIOR {
            return bad(format!("nx must be >= {}, got {}", crate::grid::MIN_INTERIOR, self.nx));
        }
        if self.neta < 2 {
            return bad(format!("neta must be >= 2, got {}", self.neta));
        }
        if self.ledger_stride == 0 {
            return bad("ledger_stride must be >= 1".into());
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be >= 1".into());
        }
        Ok(())
    }
}
