//! Rank-based selective pressure: linear rank weights and weighted donor
//! sampling over the population and over the population/archive union.
//!
//! A member of rank `i` (1 = best) among `M` gets weight `k_r * (M - i) + 1`
//! and is drawn with probability proportional to that weight. `k_r = 0`
//! degenerates to uniform sampling.

use serde::{Deserialize, Serialize};

use crate::adaptation::elite_size;
use crate::error::{RdeError, Result};
use crate::population::{Candidate, ExternalArchive, Population};
use crate::rng::RngStream;

/// Rejection attempts before falling back to sampling from the explicitly
/// filtered candidate set.
pub const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct RankWeights {
    k_r: f64,
    weights: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

/// Linear rank weights for `m` ranked members with greediness `k_r`.
pub fn rank_weights(m: usize, k_r: f64) -> Result<RankWeights> {
    if m == 0 {
        return Err(RdeError::EmptySelection);
    }
    if !(k_r >= 0.0 && k_r.is_finite()) {
        return Err(RdeError::config(format!("rank greediness must be >= 0, got {k_r}")));
    }
    let weights: Vec<f64> = (1..=m).map(|i| k_r * (m - i) as f64 + 1.0).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let mut cumulative = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &p in &probs {
        acc += p;
        cumulative.push(acc);
    }
    Ok(RankWeights {
        k_r,
        weights,
        probs,
        cumulative,
    })
}

impl RankWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn k_r(&self) -> f64 {
        self.k_r
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Draws a rank index (0-based) with probability `probs[index]`.
    pub fn sample(&self, rng: &mut RngStream) -> usize {
        let u = rng.uniform();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.len() - 1)
    }

    /// Draws a rank index not rejected by `excluded`, with probability
    /// proportional to its weight among the allowed ranks.
    pub fn sample_excluding(
        &self,
        rng: &mut RngStream,
        excluded: impl Fn(usize) -> bool,
    ) -> Result<usize> {
        for _ in 0..MAX_RESAMPLES {
            let idx = self.sample(rng);
            if !excluded(idx) {
                return Ok(idx);
            }
        }
        let allowed: Vec<usize> = (0..self.len()).filter(|&i| !excluded(i)).collect();
        if allowed.is_empty() {
            return Err(RdeError::InsufficientCandidates {
                needed: 1,
                available: 0,
            });
        }
        let total: f64 = allowed.iter().map(|&i| self.weights[i]).sum();
        let mut target = rng.uniform() * total;
        for &i in &allowed {
            target -= self.weights[i];
            if target < 0.0 {
                return Ok(i);
            }
        }
        Ok(*allowed.last().expect("allowed is non-empty"))
    }
}

/// Which donor draws are subject to rank pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RspScope {
    /// Only `r1` and the population part of `r2`; `pbest` and archive
    /// members are drawn uniformly.
    R1r2,
    /// `pbest`, `r1` and `r2`, with archive members ranked jointly with the
    /// population.
    All,
}

impl std::str::FromStr for RspScope {
    type Err = RdeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "r1r2" => Ok(RspScope::R1r2),
            "all" => Ok(RspScope::All),
            other => Err(RdeError::config(format!("unknown rsp_scope '{other}'"))),
        }
    }
}

impl std::fmt::Display for RspScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RspScope::R1r2 => "r1r2",
            RspScope::All => "all",
        })
    }
}

/// Reference to a donor in either the population or the archive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DonorRef {
    Population(usize),
    Archive(usize),
}

impl DonorRef {
    pub fn resolve<'a>(self, pop: &'a Population, archive: &'a ExternalArchive) -> &'a Candidate {
        match self {
            DonorRef::Population(i) => pop.get(i),
            DonorRef::Archive(j) => archive.get(j),
        }
    }
}

/// Donor indices for one trial vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Picks {
    pub pbest: usize,
    pub r1: usize,
    pub r2: DonorRef,
}

/// Population and archive ranked jointly by fitness. Ties keep population
/// members ahead of archive members.
pub fn joint_ranking(pop: &Population, archive: &ExternalArchive) -> Vec<DonorRef> {
    let mut arc: Vec<usize> = (0..archive.len()).collect();
    arc.sort_by(|&a, &b| archive.get(a).fitness.total_cmp(&archive.get(b).fitness));
    let mut merged = Vec::with_capacity(pop.len() + arc.len());
    let (mut i, mut j) = (0, 0);
    while i < pop.len() || j < arc.len() {
        let take_pop = j >= arc.len()
            || (i < pop.len() && pop.fitness(i).total_cmp(&archive.get(arc[j]).fitness).is_le());
        if take_pop {
            merged.push(DonorRef::Population(i));
            i += 1;
        } else {
            merged.push(DonorRef::Archive(arc[j]));
            j += 1;
        }
    }
    merged
}

/// Per-generation donor sampler. Built once from a frozen population and
/// archive, then queried for every target individual.
#[derive(Debug, Clone)]
pub struct RspSampler {
    k_r: f64,
    scope: RspScope,
    pop_len: usize,
    archive_len: usize,
    pop_weights: RankWeights,
    union: Vec<DonorRef>,
    union_weights: RankWeights,
    elite: Option<RankWeights>,
}

impl RspSampler {
    pub fn new(
        pop: &Population,
        archive: &ExternalArchive,
        k_r: f64,
        scope: RspScope,
    ) -> Result<Self> {
        if pop.len() < 4 {
            return Err(RdeError::InsufficientCandidates {
                needed: 4,
                available: pop.len(),
            });
        }
        let union = joint_ranking(pop, archive);
        Ok(Self {
            k_r,
            scope,
            pop_len: pop.len(),
            archive_len: archive.len(),
            pop_weights: rank_weights(pop.len(), k_r)?,
            union_weights: rank_weights(union.len(), k_r)?,
            union,
            elite: None,
        })
    }

    fn elite_weights(&mut self, m: usize) -> Result<&RankWeights> {
        let k_r = match self.scope {
            RspScope::All => self.k_r,
            RspScope::R1r2 => 0.0,
        };
        if self.elite.as_ref().map(RankWeights::len) != Some(m) {
            self.elite = Some(rank_weights(m, k_r)?);
        }
        Ok(self.elite.as_ref().expect("just set"))
    }

    /// Draws `(pbest, r1, r2)` for target `i`: `pbest` from the best
    /// `elite` ranks, `r1` from the population, `r2` from the population and
    /// archive. All three are mutually distinct and distinct from `i`.
    pub fn sample(&mut self, i: usize, elite: usize, rng: &mut RngStream) -> Result<Picks> {
        let elite = elite.clamp(1, self.pop_len);
        let pbest = {
            let w = self.elite_weights(elite)?;
            match w.sample_excluding(rng, |c| c == i) {
                Ok(c) => c,
                // The elite holds only `i`; widen to the whole population.
                Err(_) => self.pop_weights.sample_excluding(rng, |c| c == i)?,
            }
        };
        let r1 = self
            .pop_weights
            .sample_excluding(rng, |c| c == i || c == pbest)?;
        let clashes = |d: DonorRef| matches!(d, DonorRef::Population(c) if c == i || c == pbest || c == r1);
        let r2 = match self.scope {
            RspScope::All => {
                let union = &self.union;
                let idx = self
                    .union_weights
                    .sample_excluding(rng, |k| clashes(union[k]))?;
                union[idx]
            }
            RspScope::R1r2 => self.sample_r2_two_stage(rng, clashes)?,
        };
        Ok(Picks { pbest, r1, r2 })
    }

    // Archive chosen with probability proportional to its share of the
    // union, then a uniform archive member or a rank-weighted population one.
    fn sample_r2_two_stage(
        &self,
        rng: &mut RngStream,
        clashes: impl Fn(DonorRef) -> bool,
    ) -> Result<DonorRef> {
        let total = self.pop_len + self.archive_len;
        let archive_share = self.archive_len as f64 / total as f64;
        for _ in 0..MAX_RESAMPLES {
            let d = if self.archive_len > 0 && rng.uniform() < archive_share {
                DonorRef::Archive(rng.index(self.archive_len))
            } else {
                DonorRef::Population(self.pop_weights.sample(rng))
            };
            if !clashes(d) {
                return Ok(d);
            }
        }
        if self.archive_len > 0 {
            return Ok(DonorRef::Archive(rng.index(self.archive_len)));
        }
        let idx = self
            .pop_weights
            .sample_excluding(rng, |c| clashes(DonorRef::Population(c)))?;
        Ok(DonorRef::Population(idx))
    }
}

/// One-shot donor draw for target `i` with elite fraction `p`.
pub fn sample_distinct_rsp(
    pop: &Population,
    archive: &ExternalArchive,
    i: usize,
    p: f64,
    k_r: f64,
    scope: RspScope,
    rng: &mut RngStream,
) -> Result<Picks> {
    let mut sampler = RspSampler::new(pop, archive, k_r, scope)?;
    sampler.sample(i, elite_size(p, pop.len()), rng)
}
