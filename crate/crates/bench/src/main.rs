use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hsdm_bench::output::write_all;
use hsdm_bench::sweep::{run_sweep, write_sweep, SWEEP_FILE};
use hsdm_bench::{run_experiment, suites, BenchError, ExperimentConfig};

/// Monte Carlo experiments for sparse system identification with
/// hierarchical RLS estimators.
#[derive(Parser)]
#[command(name = "hsdm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Grid over the config's [sweep] table and rank the step sizes.
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run the mapping, prox, moment, engine-equivalence and exact-mapping suites.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Overrides {
    fn load(&self, path: &Path) -> hsdm_bench::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(path)?;
        if let Some(seed) = self.seed {
            cfg.scenario.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(out) = &self.out {
            cfg.output = out.clone();
        }
        if let Some(threads) = self.threads {
            cfg.threads = Some(threads);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cfg: &ExperimentConfig) -> hsdm_bench::Result<ExitCode> {
    let result = run_experiment(cfg)?;
    let files = write_all(&cfg.output, &result, cfg.traces, cfg.diagnostics)?;
    print!("{}", hsdm_bench::output::summary(&result));
    for f in files {
        println!("wrote {}", f.display());
    }
    let failed: Vec<&str> = result.algorithms.iter().filter(|a| a.all_diverged()).map(|a| a.label.as_str()).collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: every trial diverged for {}", failed.join(", "));
        Ok(ExitCode::from(3))
    }
}

fn sweep(cfg: &ExperimentConfig) -> hsdm_bench::Result<ExitCode> {
    let rows = run_sweep(cfg)?;
    std::fs::create_dir_all(&cfg.output)?;
    let path = cfg.output.join(SWEEP_FILE);
    write_sweep(std::fs::File::create(&path)?, &rows)?;
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.base.cmp(&b.base).then(a.rank.cmp(&b.rank)));
    println!("{:<40} {:>6} {:>10} {:>16} {:>14}", "algorithm", "rank", "lambda", "steps_to_target", "final_nrmsd");
    for r in &sorted {
        let steps = r.steps_to_target.map(|s| s.to_string()).unwrap_or_else(|| "-".into());
        println!("{:<40} {:>6} {:>10.4} {:>16} {:>14.6e}", r.label, r.rank, r.lambda, steps, r.final_mean);
    }
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn verify(seed: u64) -> ExitCode {
    let reports = suites::all(seed);
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, overrides } => overrides.load(config).and_then(|cfg| run(&cfg)),
        Command::Sweep { config, overrides } => overrides.load(config).and_then(|cfg| sweep(&cfg)),
        Command::Verify { seed } => Ok(verify(*seed)),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &BenchError) -> u8 {
    e.exit_code() as u8
}
