//! Binomial crossover with Cauchy perturbation of inherited coordinates,
//! midpoint boundary repair, and one-to-one survivor selection.

use crate::problem::Bounds;
use crate::rng::RngStream;

/// Scale of the Cauchy perturbation in problem units.
pub const PERTURB_SCALE: f64 = 0.1;

/// Builds the trial vector. For each dimension `j`: the mutant value when
/// `j == j_rand` or `rand < cr`; otherwise, when `rand < p_r`, a Cauchy draw
/// centred on the parent value with scale `scales[j]`; otherwise the parent
/// value. The second draw happens only when the first test fails and
/// `p_r > 0`.
pub fn crossover_perturb(
    parent: &[f64],
    mutant: &[f64],
    cr: f64,
    p_r: f64,
    scales: &[f64],
    rng: &mut RngStream,
) -> Vec<f64> {
    let dim = parent.len();
    let j_rand = rng.index(dim);
    (0..dim)
        .map(|j| {
            if j == j_rand || rng.uniform() < cr {
                mutant[j]
            } else if p_r > 0.0 && rng.uniform() < p_r {
                rng.cauchy(parent[j], scales[j])
            } else {
                parent[j]
            }
        })
        .collect()
}

/// Moves each out-of-bounds coordinate halfway between the violated bound
/// and the parent's coordinate.
pub fn repair_bounds(u: &mut [f64], parent: &[f64], bounds: &Bounds) {
    for (j, v) in u.iter_mut().enumerate() {
        let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
        if *v < lo {
            *v = (lo + parent[j]) / 2.0;
        } else if *v > hi {
            *v = (hi + parent[j]) / 2.0;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub offspring_survives: bool,
    /// Strict improvement; ties replace the parent but are not successes.
    pub success: bool,
    pub improvement: f64,
}

pub fn select_survivor(parent_fitness: f64, offspring_fitness: f64) -> Selection {
    let offspring_survives = offspring_fitness <= parent_fitness;
    let success = offspring_fitness < parent_fitness;
    Selection {
        offspring_survives,
        success,
        improvement: if success {
            parent_fitness - offspring_fitness
        } else {
            0.0
        },
    }
}
