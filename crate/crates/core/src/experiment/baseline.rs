//! Classic DE/rand/1/bin with fixed parameters, run under the same budget,
//! repair and RNG contract as the main optimizer.

use crate::error::{RdeError, Result};
use crate::evaluator::{fitness_error, Evaluator};
use crate::optimizer::RunResult;
use crate::population::{init_population, Candidate};
use crate::problem::Problem;
use crate::rng::RngStream;
use crate::variation::{crossover_perturb, repair_bounds, select_survivor};

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub dim: usize,
    pub max_nfes: usize,
    pub pop_per_dim: usize,
    pub f: f64,
    pub cr: f64,
    pub seed: u64,
    pub rng_stream: u64,
}

impl BaselineConfig {
    pub fn for_dimension(dim: usize) -> Self {
        Self {
            dim,
            max_nfes: crate::optimizer::NFES_PER_DIM * dim,
            pop_per_dim: 5,
            f: 0.5,
            cr: 0.9,
            seed: 0,
            rng_stream: 0,
        }
    }

    pub fn population(&self) -> usize {
        self.pop_per_dim * self.dim
    }
}

/// Runs DE/rand/1/bin: `v = x_r1 + F (x_r2 - x_r3)` with three distinct
/// donors different from the target, binomial crossover and synchronous
/// one-to-one selection.
pub fn baseline_de_rand1<P: Problem + ?Sized>(problem: &P, config: &BaselineConfig) -> Result<RunResult> {
    if problem.dim() != config.dim {
        return Err(RdeError::DimensionMismatch {
            expected: config.dim,
            actual: problem.dim(),
        });
    }
    let n = config.population();
    if config.max_nfes <= n {
        return Err(RdeError::config(format!(
            "max_nfes {} must exceed the population {n}",
            config.max_nfes
        )));
    }
    let mut rng = RngStream::with_stream(config.seed, config.rng_stream);
    let mut eval = Evaluator::new(problem, config.max_nfes);
    let mut pop = init_population(&mut eval, n, &mut rng)?;
    let bounds = problem.bounds();
    let no_scales = vec![0.0; config.dim];
    let mut generations = 0;

    while !eval.exhausted() {
        generations += 1;
        let mut next: Vec<Candidate> = pop.members().to_vec();
        for (i, slot) in next.iter_mut().enumerate() {
            if eval.exhausted() {
                break;
            }
            let mut picks = [i; 3];
            for k in 0..3 {
                picks[k] = loop {
                    let r = rng.index(n);
                    if r != i && !picks[..k].contains(&r) {
                        break r;
                    }
                };
            }
            let [a, b, c] = picks.map(|r| &pop.get(r).x);
            let mutant: Vec<f64> = a
                .iter()
                .zip(b)
                .zip(c)
                .map(|((x1, x2), x3)| x1 + config.f * (x2 - x3))
                .collect();
            let target = pop.get(i);
            let mut trial = crossover_perturb(&target.x, &mutant, config.cr, 0.0, &no_scales, &mut rng);
            repair_bounds(&mut trial, &target.x, bounds);
            let fitness = eval.evaluate(&trial).expect("budget checked above");
            if select_survivor(target.fitness, fitness).offspring_survives {
                *slot = Candidate::evaluated(trial, fitness);
            }
        }
        pop.replace(next);
    }

    let nfes_used = eval.nfes();
    let trace = eval.into_trace();
    let best = pop.best().expect("population is never empty").clone();
    Ok(RunResult {
        error: fitness_error(best.fitness, problem.optimum_value()),
        best,
        nfes_used,
        generations,
        final_population: pop.len(),
        trace,
    })
}
