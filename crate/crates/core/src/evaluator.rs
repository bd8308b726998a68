//! Budgeted objective evaluation with exact call counting and a sampled
//! convergence trace.

use crate::problem::Problem;

/// Errors below this value are reported as exactly zero.
pub const ERROR_FLOOR: f64 = 1e-8;

/// Number of budget checkpoints recorded in a convergence trace.
pub const TRACE_POINTS: usize = 16;

/// Error of `fitness` relative to a known optimum, floored to zero below
/// [`ERROR_FLOOR`]. Without a known optimum the raw fitness is used.
pub fn fitness_error(fitness: f64, optimum: Option<f64>) -> f64 {
    let raw = fitness - optimum.unwrap_or(0.0);
    if raw < ERROR_FLOOR {
        0.0
    } else {
        raw
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub nfes: usize,
    pub best_error: f64,
}

/// Logarithmically spaced evaluation counts in `[1, max_nfes]`, ending at
/// `max_nfes`.
pub fn trace_checkpoints(max_nfes: usize) -> Vec<usize> {
    let mut points: Vec<usize> = (0..TRACE_POINTS)
        .map(|m| {
            let frac = m as f64 / (TRACE_POINTS - 1) as f64;
            ((max_nfes as f64).powf(frac).round() as usize).clamp(1, max_nfes.max(1))
        })
        .collect();
    points.dedup();
    if let Some(last) = points.last_mut() {
        *last = max_nfes.max(1);
    }
    points
}

/// Wraps a problem, counting every evaluation against a fixed budget.
pub struct Evaluator<'a, P: ?Sized> {
    problem: &'a P,
    nfes: usize,
    max_nfes: usize,
    best_fitness: f64,
    checkpoints: Vec<usize>,
    next_checkpoint: usize,
    trace: Vec<TracePoint>,
}

impl<'a, P: Problem + ?Sized> Evaluator<'a, P> {
    pub fn new(problem: &'a P, max_nfes: usize) -> Self {
        Self {
            problem,
            nfes: 0,
            max_nfes,
            best_fitness: f64::INFINITY,
            checkpoints: trace_checkpoints(max_nfes),
            next_checkpoint: 0,
            trace: Vec::with_capacity(TRACE_POINTS),
        }
    }

    pub fn problem(&self) -> &'a P {
        self.problem
    }

    pub fn nfes(&self) -> usize {
        self.nfes
    }

    pub fn max_nfes(&self) -> usize {
        self.max_nfes
    }

    pub fn remaining(&self) -> usize {
        self.max_nfes - self.nfes
    }

    pub fn exhausted(&self) -> bool {
        self.nfes >= self.max_nfes
    }

    pub fn best_fitness(&self) -> f64 {
        self.best_fitness
    }

    /// Evaluates `x`, or returns `None` once the budget is spent.
    pub fn evaluate(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        let f = self.problem.evaluate(x);
        self.nfes += 1;
        if f < self.best_fitness {
            self.best_fitness = f;
        }
        while self.next_checkpoint < self.checkpoints.len()
            && self.nfes >= self.checkpoints[self.next_checkpoint]
        {
            self.trace.push(TracePoint {
                nfes: self.nfes,
                best_error: fitness_error(self.best_fitness, self.problem.optimum_value()),
            });
            self.next_checkpoint += 1;
        }
        Some(f)
    }

    pub fn into_trace(self) -> Vec<TracePoint> {
        self.trace
    }
}
