//! Flat `key = value` run configuration.

use std::path::{Path, PathBuf};

use crate::error::{MemsError, Result};
use crate::grid::Grid1D;
use crate::norms::FractionalNormContext;
use crate::params::ModelParams;

/// Initial displacement or velocity.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// `c e_1` with `e_1` the unit principal eigenvector.
    ScaledEigenmode(f64),
    /// `a (1 - x^2)^2`
    PolynomialBump(f64),
    /// Whitespace-separated interior values.
    File(PathBuf),
}

impl InitialCondition {
    pub fn parse(s: &str) -> std::result::Result<Self, String> {
        let mut parts = s.split_whitespace();
        let kind = parts.next().ok_or("empty initial condition")?;
        let rest: Vec<&str> = parts.collect();
        let number = |rest: &[&str]| -> std::result::Result<f64, String> {
            match rest {
                [v] => v.parse::<f64>().map_err(|_| format!("invalid number {v:?}")),
                _ => Err(format!("{kind} takes exactly one number")),
            }
        };
        match kind {
            "zero" if rest.is_empty() => Ok(Self::Zero),
            "zero" => Err("zero takes no arguments".into()),
            "scaled_eigenmode" => Ok(Self::ScaledEigenmode(number(&rest)?)),
            "polynomial_bump" => Ok(Self::PolynomialBump(number(&rest)?)),
            "file" if rest.len() == 1 => Ok(Self::File(PathBuf::from(rest[0]))),
            "file" => Err("file takes one path".into()),
            other => Err(format!(
                "unknown initial condition {other:?} (expected zero, scaled_eigenmode, polynomial_bump or file)"
            )),
        }
    }

    /// Samples the condition on the interior nodes.
    pub fn realise(&self, grid: &Grid1D, norms: &FractionalNormContext) -> Result<Vec<f64>> {
        match self {
            Self::Zero => Ok(vec![0.0; grid.n_interior()]),
            Self::ScaledEigenmode(c) => Ok(norms.eigenvector(0).iter().map(|v| c * v).collect()),
            Self::PolynomialBump(a) => Ok(grid.sample(|x| a * (1.0 - x * x).powi(2))),
            Self::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| MemsError::Io(format!("{}: {e}", path.display())))?;
                let vals = text
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<f64>().map_err(|_| {
                            MemsError::Argument(format!("{}: invalid number {t:?}", path.display()))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                grid.check_len(&vals, "initial condition file")?;
                Ok(vals)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
            || matches!(self, Self::ScaledEigenmode(c) | Self::PolynomialBump(c) if *c == 0.0)
    }
}

/// Model parameters plus the experiment keys.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub gamma_list: Vec<f64>,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub horizon: f64,
    pub bisection_tol: f64,
    pub output_dir: Option<PathBuf>,
    pub seed: u64,
    pub initial_condition: InitialCondition,
    pub initial_velocity: InitialCondition,
    pub lambda_start: f64,
    pub lambda_step: f64,
    pub lambda_max_step: f64,
    pub arclength: bool,
    pub max_points: usize,
    pub min_gap_stop: f64,
    pub eps_compare: bool,
    pub compare_eps: f64,
    pub compare_lambdas: Vec<f64>,
    pub pull_in: bool,
    pub c3_samples: usize,
    pub lipschitz_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            gamma_list: vec![0.4, 0.2, 0.1, 0.05],
            lambda_lo: 0.0,
            lambda_hi: 50.0,
            horizon: 1.0,
            bisection_tol: 0.05,
            output_dir: None,
            seed: 1,
            initial_condition: InitialCondition::Zero,
            initial_velocity: InitialCondition::Zero,
            lambda_start: 0.0,
            lambda_step: 0.5,
            lambda_max_step: 2.0,
            arclength: true,
            max_points: 200,
            min_gap_stop: 0.15,
            eps_compare: false,
            compare_eps: 1e-3,
            compare_lambdas: vec![0.5, 1.0, 1.5, 2.0, 2.5],
            pull_in: false,
            c3_samples: 200,
            lipschitz_samples: 40,
        }
    }
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid number {:?}", t.trim())))
        .collect()
}

fn boolean(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("invalid boolean {v:?}")),
    }
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse::<T>().map_err(|_| format!("invalid value {v:?}"))
}

impl RunConfig {
    /// Parses the document and validates the parameters. Unknown keys,
    /// repeated keys and malformed lines are rejected with their line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |key: &str, message: String| MemsError::Config {
                line: ln + 1,
                key: key.to_string(),
                message,
            };
            let Some((key, value)) = line.split_once('=') else {
                return Err(err("", format!("expected `key = value`, found {line:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(err(key, "key given twice".into()));
            }
            seen.push(key.to_string());
            cfg.set(key, value).map_err(|m| err(key, m))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MemsError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        let p = &mut self.params;
        match key {
            "gamma" => p.gamma = num(v)?,
            "beta" => p.beta = num(v)?,
            "tau" => p.tau = num(v)?,
            "lambda" => p.lambda = num(v)?,
            "eps" => p.eps = num(v)?,
            "alpha2" => p.alpha2 = num(v)?,
            "kappa" => p.kappa = num(v)?,
            "kappa_stop" => p.kappa_stop = num(v)?,
            "gamma1" => p.gamma1 = num(v)?,
            "dt" => p.dt = num(v)?,
            "t_end" => p.t_end = num(v)?,
            "tol_newton" => p.tol_newton = num(v)?,
            "tol_linear" => p.tol_linear = num(v)?,
            "nx" => p.nx = num(v)?,
            "neta" => p.neta = num(v)?,
            "ledger_stride" | "stride" => p.ledger_stride = num(v)?,
            "max_newton_iters" => p.max_newton_iters = num(v)?,
            "gamma_list" => self.gamma_list = list(v)?,
            "lambda_lo" => self.lambda_lo = num(v)?,
            "lambda_hi" => self.lambda_hi = num(v)?,
            "horizon" => self.horizon = num(v)?,
            "bisection_tol" => self.bisection_tol = num(v)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            "seed" => self.seed = num(v)?,
            "initial_condition" => self.initial_condition = InitialCondition::parse(v)?,
            "initial_velocity" => self.initial_velocity = InitialCondition::parse(v)?,
            "lambda_start" => self.lambda_start = num(v)?,
            "lambda_step" => self.lambda_step = num(v)?,
            "lambda_max_step" => self.lambda_max_step = num(v)?,
            "arclength" => self.arclength = boolean(v)?,
            "max_points" => self.max_points = num(v)?,
            "min_gap_stop" => self.min_gap_stop = num(v)?,
            "eps_compare" => self.eps_compare = boolean(v)?,
            "compare_eps" => self.compare_eps = num(v)?,
            "compare_lambdas" => self.compare_lambdas = list(v)?,
            "pull_in" => self.pull_in = boolean(v)?,
            "c3_samples" => self.c3_samples = num(v)?,
            "lipschitz_samples" => self.lipschitz_samples = num(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |m: String| Err(MemsError::Parameter(m));
        if self.gamma_list.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return bad(format!("gamma_list entries must be positive: {:?}", self.gamma_list));
        }
        if self.gamma_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("gamma_list must be strictly descending: {:?}", self.gamma_list));
        }
        if !(self.lambda_lo >= 0.0 && self.lambda_hi > self.lambda_lo) {
            return bad(format!(
                "need 0 <= lambda_lo < lambda_hi, got {} and {}",
                self.lambda_lo, self.lambda_hi
            ));
        }
        if !(self.horizon > 0.0 && self.bisection_tol > 0.0) {
            return bad("horizon and bisection_tol must be positive".into());
        }
        if !(self.lambda_start >= 0.0 && self.lambda_step > 0.0 && self.lambda_max_step >= self.lambda_step) {
            return bad("need lambda_start >= 0 and 0 < lambda_step <= lambda_max_step".into());
        }
        if !(self.min_gap_stop > self.params.kappa_stop && self.min_gap_stop < 1.0) {
            return bad(format!("min_gap_stop must lie in (kappa_stop, 1), got {}", self.min_gap_stop));
        }
        if !(self.compare_eps > 0.0) || self.compare_lambdas.iter().any(|l| !(*l >= 0.0)) {
            return bad("compare_eps must be positive and compare_lambdas nonnegative".into());
        }
        if self.max_points < 2 || self.c3_samples == 0 || self.lipschitz_samples == 0 {
            return bad("max_points >= 2, c3_samples >= 1 and lipschitz_samples >= 1 required".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let cfg = RunConfig::parse(
            "# sweep\nlambda = 0.5 # volts\ngamma_list = 0.4, 0.2\ninitial_condition = polynomial_bump -0.1\narclength = false\n",
        )
        .unwrap();
        assert_eq!(cfg.params.lambda, 0.5);
        assert_eq!(cfg.gamma_list, vec![0.4, 0.2]);
        assert_eq!(cfg.initial_condition, InitialCondition::PolynomialBump(-0.1));
        assert!(!cfg.arclength);
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = RunConfig::parse("lambda = 1\n\nvoltage = 3\n").unwrap_err();
        assert_eq!(
            e,
            MemsError::Config {
                line: 3,
                key: "voltage".into(),
                message: "unknown key".into()
            }
        );
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(matches!(RunConfig::parse("lambda 1"), Err(MemsError::Config { line: 1, .. })));
        assert!(matches!(RunConfig::parse("nx = 3.5"), Err(MemsError::Config { .. })));
        assert!(matches!(RunConfig::parse("dt = 1\ndt = 2"), Err(MemsError::Config { line: 2, .. })));
    }

    #[test]
    fn invalid_physics_rejected() {
        assert!(matches!(RunConfig::parse("beta = -1"), Err(MemsError::Parameter(_))));
        assert!(matches!(RunConfig::parse("gamma_list = 0.1, 0.2"), Err(MemsError::Parameter(_))));
    }

    #[test]
    fn initial_condition_grammar() {
        assert_eq!(InitialCondition::parse("zero"), Ok(InitialCondition::Zero));
        assert_eq!(
            InitialCondition::parse("scaled_eigenmode 0.05"),
            Ok(InitialCondition::ScaledEigenmode(0.05))
        );
        assert!(InitialCondition::parse("bump 1").is_err());
        assert!(InitialCondition::parse("polynomial_bump").is_err());
    }
}
