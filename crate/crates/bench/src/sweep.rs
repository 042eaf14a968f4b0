//! Grid over `(α, λ-fraction)`, ranked by how fast the mean curve reaches a
//! target NRMSD. All grid points of one trial share the same stream.

use std::io::Write;

use crate::config::{AlgorithmConfig, AlgorithmKind, ExperimentConfig, SweepConfig};
use crate::error::{BenchError, Result};
use crate::runner::run_experiment;

pub const SWEEP_FILE: &str = "sweep.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub label: String,
    pub base: String,
    pub alpha: f64,
    pub fraction: f64,
    pub lambda: f64,
    pub steps_to_target: Option<usize>,
    /// Mean NRMSD at `steps_to_target`; breaks ties between points that
    /// cross the target at the same recorded step (lower is further ahead).
    pub mean_at_target: Option<f64>,
    pub final_mean: f64,
    /// 1 is fastest; ranks are per base algorithm.
    pub rank: usize,
}

pub fn grid(cfg: &ExperimentConfig, sweep: &SweepConfig) -> Vec<(AlgorithmConfig, String, f64)> {
    let mut out = Vec::new();
    for alg in cfg.algorithms.iter().filter(|a| a.name != AlgorithmKind::Rls) {
        let alphas = if sweep.alphas.is_empty() { vec![alg.alpha] } else { sweep.alphas.clone() };
        for &alpha in &alphas {
            for &f in &sweep.fractions {
                let mut point = alg.clone();
                point.alpha = alpha;
                point.lambda = None;
                point.lambda_fraction = Some(f);
                point.label = Some(format!("{}@alpha={alpha},fraction={f}", alg.label()));
                out.push((point, alg.label(), f));
            }
        }
    }
    out
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let sweep = cfg.sweep.clone().ok_or_else(|| BenchError::Config("the configuration has no [sweep] table".into()))?;
    let points = grid(cfg, &sweep);
    if points.is_empty() {
        return Err(BenchError::Config("nothing to sweep: only rls configured".into()));
    }
    let mut exp = cfg.clone();
    exp.algorithms = points.iter().map(|(p, _, _)| p.clone()).collect();
    let result = run_experiment(&exp)?;

    let mut rows: Vec<SweepRow> = points
        .iter()
        .zip(&result.algorithms)
        .map(|((p, base, f), r)| SweepRow {
            label: r.label.clone(),
            base: base.clone(),
            alpha: p.alpha,
            fraction: *f,
            lambda: p.params().ok().flatten().map(|s| s.lambda).unwrap_or(f64::NAN),
            steps_to_target: r.steps_to(sweep.target),
            mean_at_target: r.steps_to(sweep.target).and_then(|n| r.mean_at(n)),
            final_mean: r.final_mean().unwrap_or(f64::NAN),
            rank: 0,
        })
        .collect();
    let bases: Vec<String> = rows.iter().map(|r| r.base.clone()).collect();
    for base in bases {
        let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].base == base).collect();
        idx.sort_by(|&a, &b| {
            let key = |r: &SweepRow| {
                (r.steps_to_target.unwrap_or(usize::MAX), r.mean_at_target.unwrap_or(f64::INFINITY), r.final_mean)
            };
            let (ka, kb) = (key(&rows[a]), key(&rows[b]));
            ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
        });
        for (rank, i) in idx.into_iter().enumerate() {
            rows[i].rank = rank + 1;
        }
    }
    Ok(rows)
}

/// `algorithm,alpha,lambda_fraction,lambda,steps_to_target,mean_at_target,final_mean_nrmsd,rank`;
/// an unreached target leaves `steps_to_target` and `mean_at_target` empty.
pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "algorithm",
        "alpha",
        "lambda_fraction",
        "lambda",
        "steps_to_target",
        "mean_at_target",
        "final_mean_nrmsd",
        "rank",
    ])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.alpha.to_string(),
            r.fraction.to_string(),
            r.lambda.to_string(),
            r.steps_to_target.map(|s| s.to_string()).unwrap_or_default(),
            r.mean_at_target.map(|m| m.to_string()).unwrap_or_default(),
            r.final_mean.to_string(),
            r.rank.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
