//! Command-line front end: `run`, `compare`, `timing` and `ablate`.
//!
//! Exit codes: 0 on success, 1 when a batch or I/O step fails, 2 for
//! unusable input (bad flags, unparseable configs, mismatched result sets).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::benchmarks::DESK_SUITE;
use crate::error::{RdeError, Result};

use super::compare::compare;
use super::timing::{measure_complexity, TimingPlan};
use super::{read_runs, write_outcome, Algorithm, BatchOutcome, ExperimentConfig, OUTPUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "rde", version, about = "Differential evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a batch of (problem x run) cells and write result CSVs.
    Run(BatchArgs),
    /// Compare two result sets with the rank-sum test.
    Compare(CompareArgs),
    /// Measure algorithm complexity (T0, T1, T2).
    Timing(TimingArgs),
    /// Run a batch with and without the given overrides and compare them.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
struct BatchArgs {
    /// TOML experiment file; without it the desk suite in 10-D is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a setting, e.g. `--set k_r=2` or `--set runs=5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated problem names.
    #[arg(long)]
    problems: Option<String>,
    /// `rde` or `de_rand1`.
    #[arg(long)]
    algorithm: Option<String>,
    /// Output directory (default: $RDE_OUTPUT_DIR, then `results`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Result directory or runs.csv of the reference algorithm.
    a: PathBuf,
    /// Result directory or runs.csv of the competitor.
    b: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value = "A")]
    label_a: String,
    #[arg(long, default_value = "B")]
    label_b: String,
    /// Also write the comparison as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TimingArgs {
    #[arg(long, default_value_t = 30)]
    dim: usize,
    #[arg(long, default_value_t = super::timing::TIMING_NFES)]
    nfes: usize,
    #[arg(long, default_value_t = super::timing::TIMING_REPEATS)]
    repeats: usize,
}

#[derive(Debug, Args)]
struct AblateArgs {
    #[command(flatten)]
    batch: BatchArgs,
    /// Override applied only to the ablated batch, e.g. `--ablate enable_rsp=false`.
    #[arg(long = "ablate", value_name = "KEY=VALUE", required = true)]
    ablations: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

enum Failure {
    Input(String),
    Runtime(String),
}

impl From<RdeError> for Failure {
    fn from(e: RdeError) -> Self {
        match e {
            RdeError::Io(_) | RdeError::Csv(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Timing(a) => cmd_timing(&a),
        Command::Ablate(a) => cmd_ablate(&a),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

pub fn main_from_env() -> i32 {
    main_with_args(std::env::args_os())
}

fn split_pair(s: &str) -> Result<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| RdeError::config(format!("expected KEY=VALUE, got '{s}'")))
}

fn build_config(a: &BatchArgs) -> Result<ExperimentConfig> {
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(10, DESK_SUITE),
    };
    if let Some(d) = a.dim {
        config.apply_override("dim", &d.to_string())?;
    }
    if let Some(r) = a.runs {
        config.apply_override("runs", &r.to_string())?;
    }
    if let Some(s) = a.seed {
        config.apply_override("seed", &s.to_string())?;
    }
    if let Some(p) = &a.problems {
        config.apply_override("problems", p)?;
    }
    if let Some(alg) = &a.algorithm {
        config.apply_override("algorithm", alg)?;
    }
    for o in &a.overrides {
        let (k, v) = split_pair(o)?;
        config.apply_override(k, v)?;
    }
    Ok(config)
}

fn output_dir(a: &BatchArgs) -> PathBuf {
    a.out
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn execute(config: &ExperimentConfig, dir: &Path) -> std::result::Result<BatchOutcome, Failure> {
    let outcome = super::run_batch(config)?;
    write_outcome(dir, &outcome).map_err(|e| Failure::Runtime(e.to_string()))?;
    std::fs::write(dir.join("config.toml"), config.to_toml_string())
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    for s in outcome.summaries() {
        println!(
            "{:<12} runs={:<3} mean={:e} sd={:e}",
            s.problem, s.runs, s.mean, s.sd
        );
    }
    if !outcome.failures.is_empty() {
        for f in &outcome.failures {
            eprintln!("run {} on {} failed: {}", f.run, f.problem, f.message);
        }
        return Err(Failure::Runtime(format!(
            "{} of {} cells failed; partial results kept in {}",
            outcome.failures.len(),
            outcome.failures.len() + outcome.records.len(),
            dir.display()
        )));
    }
    Ok(outcome)
}

fn cmd_run(a: &BatchArgs) -> std::result::Result<(), Failure> {
    let config = build_config(a)?;
    let dir = output_dir(a);
    execute(&config, &dir)?;
    println!("results written to {}", dir.display());
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> std::result::Result<(), Failure> {
    let ra = read_runs(&a.a).map_err(|e| Failure::Input(e.to_string()))?;
    let rb = read_runs(&a.b).map_err(|e| Failure::Input(e.to_string()))?;
    let c = compare(&ra, &rb, a.alpha)?;
    print!("{}", c.to_text(&a.label_a, &a.label_b));
    if let Some(path) = &a.csv {
        std::fs::write(path, c.to_csv(&a.label_a, &a.label_b))
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    Ok(())
}

fn cmd_timing(a: &TimingArgs) -> std::result::Result<(), Failure> {
    if a.repeats == 0 {
        return Err(Failure::Input("repeats must be at least 1".into()));
    }
    let plan = TimingPlan {
        nfes: a.nfes,
        repeats: a.repeats,
        ..TimingPlan::default()
    };
    let r = measure_complexity(a.dim, plan)?;
    println!("D          {}", r.dim);
    println!("T0         {:.4}", r.t0);
    println!("T1         {:.4}", r.t1);
    for (i, t) in r.t2.iter().enumerate() {
        println!("T2[{i}]      {t:.4}");
    }
    println!("T2_hat     {:.4}", r.t2_hat);
    println!("complexity {:.2}", r.complexity);
    Ok(())
}

fn cmd_ablate(a: &AblateArgs) -> std::result::Result<(), Failure> {
    let full = build_config(&a.batch)?;
    if full.algorithm != Algorithm::Rde {
        return Err(Failure::Input("ablation applies to the rde algorithm".into()));
    }
    let mut ablated = full.clone();
    for o in &a.ablations {
        let (k, v) = split_pair(o)?;
        ablated.apply_override(k, v)?;
    }
    let dir = output_dir(&a.batch);
    let full_out = execute(&full, &dir.join("full"))?;
    let ablated_out = execute(&ablated, &dir.join("ablated"))?;
    let c = compare(&full_out.records, &ablated_out.records, a.alpha)?;
    print!("{}", c.to_text("full", "ablated"));
    std::fs::write(dir.join("comparison.csv"), c.to_csv("full", "ablated"))
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    Ok(())
}
