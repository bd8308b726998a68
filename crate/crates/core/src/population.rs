//! Candidates, the fitness-sorted population and the external archive.

use crate::error::{RdeError, Result};
use crate::evaluator::Evaluator;
use crate::problem::Problem;
use crate::rng::RngStream;

/// Smallest population the mutation operators can work with: the target plus
/// three mutually distinct donors.
pub const MIN_POPULATION: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub fitness: f64,
    /// Whether `fitness` is the objective value at `x`.
    pub fresh: bool,
}

impl Candidate {
    pub fn evaluated(x: Vec<f64>, fitness: f64) -> Self {
        Self {
            x,
            fitness,
            fresh: true,
        }
    }

    pub fn unevaluated(x: Vec<f64>) -> Self {
        Self {
            x,
            fitness: f64::INFINITY,
            fresh: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// Members ordered ascending by fitness; index 0 is rank 1 (the best).
#[derive(Debug, Clone, Default)]
pub struct Population {
    members: Vec<Candidate>,
}

impl Population {
    pub fn from_members(mut members: Vec<Candidate>) -> Self {
        sort_by_fitness(&mut members);
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Candidate {
        &self.members[i]
    }

    pub fn best(&self) -> Option<&Candidate> {
        self.members.first()
    }

    pub fn fitness(&self, i: usize) -> f64 {
        self.members[i].fitness
    }

    /// Replaces all members and restores the ordering.
    pub fn replace(&mut self, members: Vec<Candidate>) {
        self.members = members;
        sort_by_fitness(&mut self.members);
    }

    /// Drops the worst-ranked members so that at most `n` remain.
    pub fn truncate(&mut self, n: usize) {
        self.members.truncate(n);
    }

    pub fn is_sorted(&self) -> bool {
        self.members
            .windows(2)
            .all(|w| w[0].fitness.total_cmp(&w[1].fitness).is_le())
    }

    pub fn into_members(self) -> Vec<Candidate> {
        self.members
    }
}

/// Stable ascending sort; equal fitness keeps insertion order.
pub fn sort_by_fitness(members: &mut [Candidate]) {
    members.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

/// Archive capacity for a population of `n` members at archive rate `rate`.
pub fn archive_capacity(rate: f64, n: usize) -> usize {
    (rate * n as f64).round().max(0.0) as usize
}

/// Store of defeated parents, used as extra donors for the last difference
/// term. Overflow evicts uniformly random members.
#[derive(Debug, Clone, Default)]
pub struct ExternalArchive {
    members: Vec<Candidate>,
    capacity: usize,
}

impl ExternalArchive {
    pub fn new(capacity: usize) -> Self {
        Self {
            members: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn members(&self) -> &[Candidate] {
        &self.members
    }

    pub fn get(&self, i: usize) -> &Candidate {
        &self.members[i]
    }

    pub fn insert(&mut self, defeated_parent: Candidate, rng: &mut RngStream) {
        if self.capacity == 0 {
            return;
        }
        self.members.push(defeated_parent);
        self.evict_to_capacity(rng);
    }

    /// Changes the capacity, evicting random members if the archive overflows.
    pub fn resize(&mut self, capacity: usize, rng: &mut RngStream) {
        self.capacity = capacity;
        self.evict_to_capacity(rng);
    }

    fn evict_to_capacity(&mut self, rng: &mut RngStream) {
        while self.members.len() > self.capacity {
            let victim = rng.index(self.members.len());
            self.members.swap_remove(victim);
        }
    }
}

/// Samples `n` candidates uniformly inside the problem bounds, evaluates them
/// through `evaluator` and returns them sorted.
pub fn init_population<P: Problem + ?Sized>(
    evaluator: &mut Evaluator<'_, P>,
    n: usize,
    rng: &mut RngStream,
) -> Result<Population> {
    if n < MIN_POPULATION {
        return Err(RdeError::config(format!(
            "population size {n} is below the minimum of {MIN_POPULATION}"
        )));
    }
    if evaluator.remaining() < n {
        return Err(RdeError::config(format!(
            "evaluation budget {} cannot cover an initial population of {n}",
            evaluator.max_nfes()
        )));
    }
    let bounds = evaluator.problem().bounds().clone();
    let mut members = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = bounds
            .lower()
            .iter()
            .zip(bounds.upper())
            .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
            .collect();
        let fitness = evaluator
            .evaluate(&x)
            .expect("budget checked before sampling");
        members.push(Candidate::evaluated(x, fitness));
    }
    Ok(Population::from_members(members))
}
