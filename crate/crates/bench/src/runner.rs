//! Monte Carlo trials: one data stream per trial, shared by every algorithm.

use hsdm_core::linalg::{dist2, norm2};
use hsdm_core::{Error as CoreError, Vector};
use ndarray::ArrayView1;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// `||x - θ|| / ||θ||`.
pub fn nrmsd(x: ArrayView1<f64>, theta: ArrayView1<f64>) -> hsdm_core::Result<f64> {
    let scale = norm2(theta);
    if scale == 0.0 {
        return Err(CoreError::ZeroTruth);
    }
    Ok(dist2(x, theta) / scale)
}

/// Recorded curve of one algorithm in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub trial: usize,
    /// Number of samples consumed at each record.
    pub steps: Vec<usize>,
    pub nrmsd: Vec<f64>,
    pub varpi: Vec<Option<f64>>,
    pub step_delta: Vec<f64>,
    /// Sample index at which the estimator failed, if it did.
    pub diverged_at: Option<usize>,
}

/// Per-step mean curve over the non-diverged trials.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCurve {
    pub steps: Vec<usize>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials_used: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmResult {
    pub label: String,
    /// Indexed by trial.
    pub traces: Vec<TrialTrace>,
    pub mean: MeanCurve,
}

impl AlgorithmResult {
    pub fn diverged(&self) -> usize {
        self.traces.iter().filter(|t| t.diverged_at.is_some()).count()
    }

    pub fn all_diverged(&self) -> bool {
        self.diverged() == self.traces.len()
    }

    /// First recorded step with mean NRMSD at or below `target`.
    pub fn steps_to(&self, target: f64) -> Option<usize> {
        self.mean.steps.iter().zip(&self.mean.mean).find(|(_, &m)| m <= target).map(|(&s, _)| s)
    }

    /// Mean NRMSD at the recorded step `step`.
    pub fn mean_at(&self, step: usize) -> Option<f64> {
        self.mean.steps.iter().position(|&s| s == step).map(|i| self.mean.mean[i])
    }

    pub fn final_mean(&self) -> Option<f64> {
        self.mean.mean.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub algorithms: Vec<AlgorithmResult>,
    pub trials: usize,
}

impl ExperimentResult {
    pub fn get(&self, label: &str) -> Option<&AlgorithmResult> {
        self.algorithms.iter().find(|a| a.label == label)
    }
}

/// Runs every configured algorithm on trial `trial`'s stream.
pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Vec<TrialTrace>> {
    let dim = cfg.scenario.dim;
    let mut estimators = cfg.algorithms.iter().map(|a| a.build(dim)).collect::<Result<Vec<_>>>()?;
    let capacity = cfg.scenario.horizon / cfg.record_every;
    let mut traces: Vec<TrialTrace> = (0..estimators.len())
        .map(|_| TrialTrace {
            trial,
            steps: Vec::with_capacity(capacity),
            nrmsd: Vec::with_capacity(capacity),
            varpi: Vec::with_capacity(capacity),
            step_delta: Vec::with_capacity(capacity),
            diverged_at: None,
        })
        .collect();

    for sample in cfg.scenario.stream(trial as u64)? {
        let record = sample.n % cfg.record_every == 0;
        for (est, trace) in estimators.iter_mut().zip(traces.iter_mut()) {
            if trace.diverged_at.is_some() {
                continue;
            }
            match est.observe(sample.a.view(), sample.b) {
                Ok(()) => {}
                Err(CoreError::NonFinite { .. }) => {
                    trace.diverged_at = Some(sample.n);
                    continue;
                }
                Err(e) => return Err(e.into()),
            }
            if record {
                let x: Vector = est.estimate();
                trace.steps.push(sample.n);
                trace.nrmsd.push(nrmsd(x.view(), sample.theta.view())?);
                trace.varpi.push(est.varpi());
                trace.step_delta.push(est.step_delta());
            }
        }
    }
    Ok(traces)
}

fn mean_curve(traces: &[TrialTrace], steps: &[usize]) -> MeanCurve {
    let used: Vec<&TrialTrace> = traces.iter().filter(|t| t.diverged_at.is_none()).collect();
    let k = used.len();
    let mut mean = Vec::with_capacity(steps.len());
    let mut stderr = Vec::with_capacity(steps.len());
    for i in 0..steps.len() {
        if k == 0 {
            mean.push(f64::NAN);
            stderr.push(f64::NAN);
            continue;
        }
        let m = used.iter().map(|t| t.nrmsd[i]).sum::<f64>() / k as f64;
        let se = if k > 1 {
            let var = used.iter().map(|t| (t.nrmsd[i] - m).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        stderr.push(se);
    }
    MeanCurve { steps: steps.to_vec(), mean, stderr, trials_used: k }
}

/// All trials, in parallel on a dedicated pool; results are gathered in
/// trial order so the output does not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.resolved_threads()).build()?;
    let per_trial: Vec<Vec<TrialTrace>> =
        pool.install(|| (0..cfg.trials).into_par_iter().map(|t| run_trial(cfg, t)).collect::<Result<Vec<_>>>())?;

    let steps: Vec<usize> = (1..=cfg.scenario.horizon / cfg.record_every).map(|i| i * cfg.record_every).collect();
    let mut by_alg: Vec<Vec<TrialTrace>> = vec![Vec::with_capacity(cfg.trials); cfg.algorithms.len()];
    for trial in per_trial {
        for (slot, trace) in by_alg.iter_mut().zip(trial) {
            slot.push(trace);
        }
    }
    let algorithms = cfg
        .algorithms
        .iter()
        .zip(by_alg)
        .map(|(alg, traces)| AlgorithmResult { label: alg.label(), mean: mean_curve(&traces, &steps), traces })
        .collect();
    Ok(ExperimentResult { algorithms, trials: cfg.trials })
}
