//! Experiment configuration, read from TOML.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use hsdm_core::datagen::Scenario;
use hsdm_core::solvers::online::{CreglsOnline, HlsSettings, HrlsaOnline, HrlsbOnline, OnlineEstimator, RlsOnline};
use hsdm_core::solvers::{SolverParams, VarpiMode};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Environment variable consulted when neither the config nor the command
/// line fixes the thread count.
pub const THREADS_ENV: &str = "HSDM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Hrlsa,
    Hrlsb,
    Cregls,
    Rls,
}

impl AlgorithmKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Hrlsa => "hrlsa",
            AlgorithmKind::Hrlsb => "hrlsb",
            AlgorithmKind::Cregls => "cregls",
            AlgorithmKind::Rls => "rls",
        }
    }
}

fn default_alpha() -> f64 {
    0.5
}

fn one() -> f64 {
    1.0
}

fn default_rls_delta() -> f64 {
    1e-2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub name: AlgorithmKind,
    /// Column value in the CSV files; defaults to `name`.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Absolute step size; mutually exclusive with `lambda_fraction`.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Step size as a fraction of the upper bound `2(1 - alpha)/lipschitz`.
    #[serde(default)]
    pub lambda_fraction: Option<f64>,
    /// Lipschitz surrogate; the smooth term is zero, so any positive value.
    #[serde(default = "one")]
    pub lipschitz: f64,
    #[serde(default)]
    pub varpi: VarpiMode,
    /// HRLSb resolvent parameter; defaults to `lambda`.
    #[serde(default)]
    pub kappa: Option<f64>,
    /// CRegLS ℓ1 weight.
    #[serde(default = "one")]
    pub rho: f64,
    /// Forgetting factor, for the running moments and for RLS.
    #[serde(default = "one")]
    pub forgetting: f64,
    /// RLS initial covariance `P_0 = I / delta`.
    #[serde(default = "default_rls_delta")]
    pub delta: f64,
    /// HRLS initial moment matrix `R_0 = r0_scale * I`.
    #[serde(default)]
    pub r0_scale: f64,
}

impl AlgorithmConfig {
    pub fn new(name: AlgorithmKind) -> Self {
        AlgorithmConfig {
            name,
            label: None,
            alpha: default_alpha(),
            lambda: None,
            lambda_fraction: None,
            lipschitz: 1.0,
            varpi: VarpiMode::default(),
            kappa: None,
            rho: 1.0,
            forgetting: 1.0,
            delta: default_rls_delta(),
            r0_scale: 0.0,
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.as_str().to_string())
    }

    /// Validated `(α, λ)` box; RLS has none.
    pub fn params(&self) -> Result<Option<SolverParams>> {
        if self.name == AlgorithmKind::Rls {
            return Ok(None);
        }
        let params = match (self.lambda, self.lambda_fraction) {
            (Some(l), None) => SolverParams::new(self.alpha, l, self.lipschitz)?,
            (None, Some(f)) => SolverParams::from_fraction(self.alpha, f, self.lipschitz)?,
            (Some(_), Some(_)) => {
                return Err(BenchError::Config(format!(
                    "{}: give either lambda or lambda_fraction, not both",
                    self.label()
                )))
            }
            (None, None) => {
                return Err(BenchError::Config(format!("{}: lambda or lambda_fraction is required", self.label())))
            }
        };
        Ok(Some(params))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if !(self.forgetting > 0.0 && self.forgetting <= 1.0) {
            return Err(BenchError::Config(format!("{}: forgetting {} outside (0, 1]", self.label(), self.forgetting)));
        }
        Ok(())
    }

    pub fn build(&self, dim: usize) -> Result<Box<dyn OnlineEstimator>> {
        let Some(params) = self.params()? else {
            return Ok(Box::new(RlsOnline::new(dim, self.forgetting, self.delta)?));
        };
        let settings = HlsSettings {
            alpha: params.alpha,
            lambda: params.lambda,
            gamma: self.forgetting,
            delta_init: self.r0_scale,
        };
        Ok(match self.name {
            AlgorithmKind::Hrlsa => Box::new(HrlsaOnline::new(dim, settings, self.varpi)?),
            AlgorithmKind::Hrlsb => Box::new(HrlsbOnline::new(dim, settings, self.kappa.unwrap_or(params.lambda))?),
            AlgorithmKind::Cregls => Box::new(CreglsOnline::new(dim, settings, self.rho)?),
            AlgorithmKind::Rls => unreachable!("handled above"),
        })
    }
}

fn default_trials() -> usize {
    50
}

fn default_stride() -> usize {
    1
}

fn default_true() -> bool {
    true
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_target() -> f64 {
    0.1
}

/// λ grid for the `sweep` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub fractions: Vec<f64>,
    /// Defaults to each algorithm's own `alpha`.
    #[serde(default)]
    pub alphas: Vec<f64>,
    /// NRMSD level whose first crossing ranks the grid points.
    #[serde(default = "default_target")]
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub algorithms: Vec<AlgorithmConfig>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_stride")]
    pub record_every: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// `None` means: `HSDM_THREADS`, else all cores.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Write the per-trial `traces.csv`.
    #[serde(default = "default_true")]
    pub traces: bool,
    /// Add the `varpi` and `step_delta` columns to `traces.csv`.
    #[serde(default)]
    pub diagnostics: bool,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.trials == 0 {
            return Err(BenchError::Config("trials must be >= 1".into()));
        }
        if self.record_every == 0 {
            return Err(BenchError::Config("record_every must be >= 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(BenchError::Config("no algorithms configured".into()));
        }
        if self.threads == Some(0) {
            return Err(BenchError::Config("threads must be >= 1".into()));
        }
        let mut labels = HashSet::new();
        for alg in &self.algorithms {
            alg.validate()?;
            if !labels.insert(alg.label()) {
                return Err(BenchError::Config(format!("duplicate algorithm label {:?}", alg.label())));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.fractions.is_empty() || sweep.fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
                return Err(BenchError::Config("sweep fractions must lie in (0, 1)".into()));
            }
            if !(sweep.target > 0.0) {
                return Err(BenchError::Config("sweep target must be positive".into()));
            }
        }
        Ok(())
    }

    /// Thread count: config, then `HSDM_THREADS`, then all cores.
    pub fn resolved_threads(&self) -> usize {
        self.threads
            .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()).filter(|&n| n > 0))
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
    }
}
