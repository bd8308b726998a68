//! Batch experiments: configuration files, seeded (problem x run) batches,
//! result CSVs, pairwise comparisons and the timing protocol.
//!
//! CSV schemas:
//!
//! * `runs.csv`: `problem,run,seed,final_error,nfes`
//! * `wall_times.csv`: `problem,run,wall_time_s`
//! * `summary.csv`: `problem,runs,mean,sd`
//! * comparison CSV: `problem,mean_a,sd_a,mean_b,sd_b,verdict`, closed by a
//!   `W/T/L` row whose verdict column holds `wins/ties/losses`.

pub mod baseline;
pub mod cli;
pub mod compare;
pub mod timing;

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{build_problem, ObjectiveFunction};
use crate::error::{RdeError, Result};
use crate::optimizer::{self, RunConfig, RunResult};
use crate::stats::{summarize, Summary};

pub use baseline::{baseline_de_rand1, BaselineConfig};
pub use compare::{compare, Comparison, ComparisonRow};
pub use timing::{measure_complexity, TimingReport};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "RDE_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    #[default]
    Rde,
    DeRand1,
}

impl std::str::FromStr for Algorithm {
    type Err = RdeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rde" => Ok(Algorithm::Rde),
            "de_rand1" => Ok(Algorithm::DeRand1),
            other => Err(RdeError::config(format!("unknown algorithm '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSection {
    #[serde(default = "default_baseline_f")]
    pub f: f64,
    #[serde(default = "default_baseline_cr")]
    pub cr: f64,
    #[serde(default = "default_baseline_pop")]
    pub pop_per_dim: usize,
}

fn default_baseline_f() -> f64 {
    0.5
}
fn default_baseline_cr() -> f64 {
    0.9
}
fn default_baseline_pop() -> usize {
    5
}
fn default_runs() -> usize {
    25
}
fn default_instance_seed() -> u64 {
    2024
}

impl Default for BaselineSection {
    fn default() -> Self {
        Self {
            f: default_baseline_f(),
            cr: default_baseline_cr(),
            pop_per_dim: default_baseline_pop(),
        }
    }
}

/// A batch description, read from TOML:
///
/// ```toml
/// dim = 10
/// runs = 25
/// seed = 1
/// problems = ["rastrigin", "ackley"]
/// algorithm = "rde"
///
/// [rde]
/// enable_cauchy_perturb = false
///
/// [de_rand1]
/// f = 0.5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_instance_seed")]
    pub instance_seed: u64,
    pub problems: Vec<String>,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nfes: Option<usize>,
    #[serde(default)]
    pub rde: BTreeMap<String, toml::Value>,
    #[serde(default)]
    pub de_rand1: BaselineSection,
}

fn value_text(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl ExperimentConfig {
    pub fn new(dim: usize, problems: &[&str]) -> Self {
        Self {
            dim,
            runs: default_runs(),
            seed: 0,
            instance_seed: default_instance_seed(),
            problems: problems.iter().map(|s| s.to_string()).collect(),
            algorithm: Algorithm::Rde,
            max_nfes: None,
            rde: BTreeMap::new(),
            de_rand1: BaselineSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(text).map_err(|e| RdeError::Parse(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RdeError::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    /// Applies one `key=value` override. Batch keys (`dim`, `runs`, `seed`,
    /// `instance_seed`, `algorithm`, `max_nfes`, `problems`) change the
    /// batch; every other key goes to the `[rde]` section.
    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_err = || RdeError::config(format!("invalid value '{value}' for '{key}'"));
        match key {
            "dim" => self.dim = value.parse().map_err(|_| parse_err())?,
            "runs" => self.runs = value.parse().map_err(|_| parse_err())?,
            "seed" => self.seed = value.parse().map_err(|_| parse_err())?,
            "instance_seed" => self.instance_seed = value.parse().map_err(|_| parse_err())?,
            "algorithm" => self.algorithm = value.parse()?,
            "max_nfes" => self.max_nfes = Some(value.parse().map_err(|_| parse_err())?),
            "problems" => {
                self.problems = value.split(',').map(|s| s.trim().to_string()).collect()
            }
            other => {
                self.rde
                    .insert(other.to_string(), toml::Value::String(value.to_string()));
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(RdeError::config("dim must be at least 1"));
        }
        if self.runs == 0 {
            return Err(RdeError::config("runs must be at least 1"));
        }
        if self.problems.is_empty() {
            return Err(RdeError::config("problem list is empty"));
        }
        for p in &self.problems {
            if !crate::benchmarks::PROBLEM_NAMES.contains(&p.as_str()) {
                return Err(RdeError::config(format!("unknown problem '{p}'")));
            }
        }
        self.rde_config()?;
        Ok(())
    }

    pub fn max_nfes(&self) -> usize {
        self.max_nfes
            .unwrap_or(optimizer::NFES_PER_DIM * self.dim)
    }

    /// Optimizer settings for this batch (seed and stream set per cell).
    pub fn rde_config(&self) -> Result<RunConfig> {
        let mut c = RunConfig::for_dimension(self.dim);
        c.max_nfes = self.max_nfes();
        for (k, v) in &self.rde {
            if k == "dim" || k == "seed" || k == "rng_stream" || k == "max_nfes" {
                return Err(RdeError::config(format!(
                    "'{k}' is a batch setting, not an [rde] key"
                )));
            }
            c.set(k, &value_text(v))?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn baseline_config(&self) -> BaselineConfig {
        BaselineConfig {
            dim: self.dim,
            max_nfes: self.max_nfes(),
            pop_per_dim: self.de_rand1.pop_per_dim,
            f: self.de_rand1.f,
            cr: self.de_rand1.cr,
            seed: 0,
            rng_stream: 0,
        }
    }

    /// Seed of run `run`: `seed + run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }
}

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub run: usize,
    pub seed: u64,
    pub final_error: f64,
    pub nfes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallTimeRecord {
    pub problem: String,
    pub run: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub problem: String,
    pub runs: usize,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub problem: String,
    pub run: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct BatchOutcome {
    pub records: Vec<RunRecord>,
    pub wall_times: Vec<WallTimeRecord>,
    pub failures: Vec<CellFailure>,
}

impl BatchOutcome {
    pub fn summaries(&self) -> Vec<SummaryRecord> {
        summarize_records(&self.records)
    }
}

/// Runs one cell. Problem `stream` selects the RNG sub-stream so that equal
/// seeds on different problems never share random numbers.
pub fn run_cell(
    config: &ExperimentConfig,
    problem: &ObjectiveFunction,
    stream: u64,
    run: usize,
) -> Result<RunResult> {
    let seed = config.run_seed(run);
    match config.algorithm {
        Algorithm::Rde => {
            let mut c = config.rde_config()?;
            c.seed = seed;
            c.rng_stream = stream;
            optimizer::run(problem, &c)
        }
        Algorithm::DeRand1 => {
            let c = BaselineConfig {
                seed,
                rng_stream: stream,
                ..config.baseline_config()
            };
            baseline_de_rand1(problem, &c)
        }
    }
}

/// Runs every (problem, run) cell, in parallel, and collects rows in
/// problem-major order. Failed cells are reported, not fatal.
pub fn run_batch(config: &ExperimentConfig) -> Result<BatchOutcome> {
    config.validate()?;
    let problems: Vec<ObjectiveFunction> = config
        .problems
        .iter()
        .map(|name| build_problem(name, config.dim, config.instance_seed))
        .collect::<Result<_>>()?;
    let cells: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|p| (0..config.runs).map(move |r| (p, r)))
        .collect();
    let results: Vec<(usize, usize, Result<RunResult>, f64)> = cells
        .par_iter()
        .map(|&(p, r)| {
            let start = Instant::now();
            let result = run_cell(config, &problems[p], p as u64, r);
            (p, r, result, start.elapsed().as_secs_f64())
        })
        .collect();

    let mut outcome = BatchOutcome::default();
    for (p, run, result, wall) in results {
        let problem = config.problems[p].clone();
        match result {
            Ok(res) => {
                outcome.records.push(RunRecord {
                    problem: problem.clone(),
                    run,
                    seed: config.run_seed(run),
                    final_error: res.error,
                    nfes: res.nfes_used,
                });
                outcome.wall_times.push(WallTimeRecord {
                    problem,
                    run,
                    wall_time_s: wall,
                });
            }
            Err(e) => outcome.failures.push(CellFailure {
                problem,
                run,
                message: e.to_string(),
            }),
        }
    }
    Ok(outcome)
}

/// Per-problem summaries, in order of first appearance.
pub fn summarize_records(records: &[RunRecord]) -> Vec<SummaryRecord> {
    group_errors(records)
        .into_iter()
        .map(|(problem, errors)| {
            let Summary { n, mean, sd } = summarize(&errors).expect("groups are non-empty");
            SummaryRecord {
                problem,
                runs: n,
                mean,
                sd,
            }
        })
        .collect()
}

/// Errors grouped by problem, in order of first appearance.
pub fn group_errors(records: &[RunRecord]) -> Vec<(String, Vec<f64>)> {
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(p, _)| *p == r.problem) {
            Some((_, errors)) => errors.push(r.final_error),
            None => groups.push((r.problem.clone(), vec![r.final_error])),
        }
    }
    groups
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

/// Writes `runs.csv`, `wall_times.csv` and `summary.csv` into `dir`.
pub fn write_outcome(dir: &Path, outcome: &BatchOutcome) -> Result<()> {
    write_csv(&dir.join("runs.csv"), &outcome.records)?;
    write_csv(&dir.join("wall_times.csv"), &outcome.wall_times)?;
    write_csv(&dir.join("summary.csv"), &outcome.summaries())?;
    Ok(())
}

/// Reads `runs.csv` from a directory, or the file itself.
pub fn read_runs(path: &Path) -> Result<Vec<RunRecord>> {
    if path.is_dir() {
        read_csv(&path.join("runs.csv"))
    } else {
        read_csv(path)
    }
}
