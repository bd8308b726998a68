//! Algorithm complexity measurement: a fixed arithmetic reference loop (T0),
//! pure evaluation time (T1) and full optimizer time (T2) on the same
//! budget, reported as `(mean T2 - T1) / T0`.

use std::hint::black_box;
use std::time::Instant;

use crate::benchmarks::build_problem;
use crate::error::Result;
use crate::optimizer::{run, RunConfig};
use crate::problem::Problem;
use crate::rng::RngStream;

pub const REFERENCE_LOOP: usize = 1_000_000;
pub const TIMING_NFES: usize = 200_000;
pub const TIMING_REPEATS: usize = 5;
/// Benchmark used for T1 and T2.
pub const TIMING_PROBLEM: &str = "hybrid";

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub dim: usize,
    pub t0: f64,
    pub t1: f64,
    pub t2: Vec<f64>,
    pub t2_hat: f64,
    pub complexity: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TimingPlan {
    pub reference_loop: usize,
    pub nfes: usize,
    pub repeats: usize,
}

impl Default for TimingPlan {
    fn default() -> Self {
        Self {
            reference_loop: REFERENCE_LOOP,
            nfes: TIMING_NFES,
            repeats: TIMING_REPEATS,
        }
    }
}

/// Seconds spent in the reference arithmetic loop.
pub fn reference_time(iterations: usize) -> f64 {
    let start = Instant::now();
    let mut acc = 0.0;
    for i in 1..=iterations {
        let mut x = black_box(0.55 + i as f64);
        x += x;
        x /= 2.0;
        x *= x;
        x = x.sqrt();
        x = x.ln();
        x = x.exp();
        x /= x + 2.0;
        acc += x;
    }
    black_box(acc);
    start.elapsed().as_secs_f64()
}

pub fn measure_complexity(dim: usize, plan: TimingPlan) -> Result<TimingReport> {
    let problem = build_problem(TIMING_PROBLEM, dim, 0)?;
    let t0 = reference_time(plan.reference_loop);

    let (lo, hi) = (problem.bounds().lower()[0], problem.bounds().upper()[0]);
    let mut rng = RngStream::new(0);
    let points: Vec<Vec<f64>> = (0..1024)
        .map(|_| (0..dim).map(|_| rng.uniform_in(lo, hi)).collect())
        .collect();
    let start = Instant::now();
    let mut acc = 0.0;
    for i in 0..plan.nfes {
        acc += problem.evaluate(black_box(&points[i % points.len()]));
    }
    black_box(acc);
    let t1 = start.elapsed().as_secs_f64();

    let config = RunConfig::for_dimension(dim).with_max_nfes(plan.nfes);
    let mut t2 = Vec::with_capacity(plan.repeats);
    for r in 0..plan.repeats {
        let start = Instant::now();
        black_box(run(&problem, &config.clone().with_seed(r as u64))?);
        t2.push(start.elapsed().as_secs_f64());
    }
    let t2_hat = t2.iter().sum::<f64>() / t2.len().max(1) as f64;
    Ok(TimingReport {
        dim,
        t0,
        t1,
        t2_hat,
        complexity: (t2_hat - t1) / t0,
        t2,
    })
}
