//! Monte Carlo harness for the hsdm-core estimators: TOML experiment
//! configs, parallel trials, NRMSD curves as CSV, λ sweeps and the property
//! suites behind `hsdm verify`.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod suites;
pub mod sweep;

pub use config::{AlgorithmConfig, AlgorithmKind, ExperimentConfig};
pub use error::{BenchError, Result};
pub use runner::{nrmsd, run_experiment, ExperimentResult};
