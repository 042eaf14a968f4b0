//! CSV and summary emission.
//!
//! `traces.csv`: `algorithm,trial,step,nrmsd[,varpi,step_delta]`, sorted by
//! (algorithm in config order, trial, step); diverged trials keep the rows
//! recorded before the failure. `means.csv`: `algorithm,step,mean_nrmsd,stderr`.
//! Floats use Rust's shortest round-trip formatting; a missing `ϖ` is empty.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::runner::ExperimentResult;

pub const TRACES_FILE: &str = "traces.csv";
pub const MEANS_FILE: &str = "means.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

pub fn write_traces<W: Write>(out: W, result: &ExperimentResult, diagnostics: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["algorithm", "trial", "step", "nrmsd"];
    if diagnostics {
        header.extend(["varpi", "step_delta"]);
    }
    w.write_record(&header)?;
    for alg in &result.algorithms {
        for trace in &alg.traces {
            for i in 0..trace.nrmsd.len() {
                let mut row = vec![
                    alg.label.clone(),
                    trace.trial.to_string(),
                    trace.steps[i].to_string(),
                    trace.nrmsd[i].to_string(),
                ];
                if diagnostics {
                    row.push(trace.varpi[i].map(|v| v.to_string()).unwrap_or_default());
                    row.push(trace.step_delta[i].to_string());
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_means<W: Write>(out: W, result: &ExperimentResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["algorithm", "step", "mean_nrmsd", "stderr"])?;
    for alg in &result.algorithms {
        for i in 0..alg.mean.steps.len() {
            w.write_record([
                alg.label.clone(),
                alg.mean.steps[i].to_string(),
                alg.mean.mean[i].to_string(),
                alg.mean.stderr[i].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn summary(result: &ExperimentResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16} {:>8} {:>8} {:>14} {:>12}", "algorithm", "trials", "diverged", "final_nrmsd", "stderr");
    for alg in &result.algorithms {
        let fin = alg.final_mean().map(|v| format!("{v:.6e}")).unwrap_or_else(|| "-".into());
        let se = alg.mean.stderr.last().map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(s, "{:<16} {:>8} {:>8} {:>14} {:>12}", alg.label, result.trials, alg.diverged(), fin, se);
    }
    s
}

/// Writes the output files into `dir`, returning their paths.
pub fn write_all(dir: &Path, result: &ExperimentResult, traces: bool, diagnostics: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if traces {
        let p = dir.join(TRACES_FILE);
        write_traces(fs::File::create(&p)?, result, diagnostics)?;
        written.push(p);
    }
    let p = dir.join(MEANS_FILE);
    write_means(fs::File::create(&p)?, result)?;
    written.push(p);
    let p = dir.join(SUMMARY_FILE);
    fs::write(&p, summary(result))?;
    written.push(p);
    Ok(written)
}
