//! Per-generation schedules and feedback loops: the success-history memory
//! for `F`/`Cr`, the staged parameter caps, the strategy ratio update, and
//! the linear `p` and population-size schedules.

use serde::{Deserialize, Serialize};

use crate::mutation::clamp_gamma;
use crate::rng::RngStream;

/// Value held by the last memory slot for the whole run.
pub const TERMINAL_VALUE: f64 = 0.9;

/// Scale of the Cauchy draw for `F` and standard deviation of the normal
/// draw for `Cr`.
pub const PARAMETER_SPREAD: f64 = 0.1;

/// How each individual picks its memory slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MemoryIndex {
    /// Every individual of generation `k` reads slot `(k - 1) mod H`.
    Cyclic,
    /// Each individual reads a uniformly random slot.
    Random,
}

impl std::str::FromStr for MemoryIndex {
    type Err = crate::error::RdeError;

    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s {
            "cyclic" => Ok(MemoryIndex::Cyclic),
            "random" => Ok(MemoryIndex::Random),
            other => Err(crate::error::RdeError::config(format!(
                "unknown memory_index '{other}'"
            ))),
        }
    }
}

impl std::fmt::Display for MemoryIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MemoryIndex::Cyclic => "cyclic",
            MemoryIndex::Random => "random",
        })
    }
}

/// `H` slots of `(mu_F, mu_Cr)`; the last slot is pinned to
/// [`TERMINAL_VALUE`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMemory {
    mu_f: Vec<f64>,
    mu_cr: Vec<f64>,
}

impl ParameterMemory {
    pub fn new(size: usize, mu_f_init: f64, mu_cr_init: f64) -> Self {
        assert!(size >= 1, "memory needs at least one slot");
        let mut mu_f = vec![mu_f_init; size];
        let mut mu_cr = vec![mu_cr_init; size];
        mu_f[size - 1] = TERMINAL_VALUE;
        mu_cr[size - 1] = TERMINAL_VALUE;
        Self { mu_f, mu_cr }
    }

    pub fn size(&self) -> usize {
        self.mu_f.len()
    }

    pub fn mu_f(&self) -> &[f64] {
        &self.mu_f
    }

    pub fn mu_cr(&self) -> &[f64] {
        &self.mu_cr
    }

    /// 0-based slot used by generation `k >= 1`.
    pub fn slot_for_generation(&self, k: usize) -> usize {
        (k.max(1) - 1) % self.size()
    }

    pub fn is_terminal(&self, slot: usize) -> bool {
        slot == self.size() - 1
    }

    /// Overwrites `slot` with the weighted Lehmer means of the successful
    /// parameters. Empty records and the terminal slot are left untouched.
    pub fn update_slot(&mut self, slot: usize, records: &SuccessRecords) {
        if records.is_empty() || self.is_terminal(slot) {
            return;
        }
        let weights = records.weights();
        if let Some(f) = weighted_lehmer_mean(&records.s_f, &weights) {
            self.mu_f[slot] = f;
        }
        self.mu_cr[slot] = weighted_lehmer_mean(&records.s_cr, &weights).unwrap_or(0.0);
    }
}

/// Parameters of the trials that strictly improved on their parents.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuccessRecords {
    pub s_f: Vec<f64>,
    pub s_cr: Vec<f64>,
    /// `parent fitness - offspring fitness`, always positive.
    pub improvements: Vec<f64>,
}

impl SuccessRecords {
    pub fn push(&mut self, f: f64, cr: f64, improvement: f64) {
        assert!(improvement > 0.0, "success records need a strict improvement");
        self.s_f.push(f);
        self.s_cr.push(cr);
        self.improvements.push(improvement);
    }

    pub fn len(&self) -> usize {
        self.improvements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.improvements.is_empty()
    }

    pub fn clear(&mut self) {
        self.s_f.clear();
        self.s_cr.clear();
        self.improvements.clear();
    }

    /// Improvement-proportional weights summing to one.
    pub fn weights(&self) -> Vec<f64> {
        let total: f64 = self.improvements.iter().sum();
        self.improvements.iter().map(|d| d / total).collect()
    }
}

/// `sum(w s^2) / sum(w s)`, or `None` when the denominator vanishes.
pub fn weighted_lehmer_mean(values: &[f64], weights: &[f64]) -> Option<f64> {
    let (num, den) = values
        .iter()
        .zip(weights)
        .fold((0.0, 0.0), |(n, d), (&s, &w)| (n + w * s * s, d + w * s));
    (den > 0.0).then(|| num / den)
}

/// Updates the slot used by generation `k` (`(k - 1) mod H`).
pub fn update_memory(memory: &mut ParameterMemory, records: &SuccessRecords, k: usize) {
    let slot = memory.slot_for_generation(k);
    memory.update_slot(slot, records);
}

/// Early-search caps: no large `F` before 60% of the budget, no small `Cr`
/// before 25% (floor 0.7) and 50% (floor 0.6).
pub fn apply_stage_constraints(f: f64, cr: f64, nfes: usize, max_nfes: usize) -> (f64, f64) {
    let progress = nfes as f64;
    let max = max_nfes as f64;
    let f = if progress < 0.6 * max && f > 0.7 { 0.7 } else { f };
    let cr = if progress < 0.25 * max && cr < 0.7 {
        0.7
    } else if progress < 0.5 * max && cr < 0.6 {
        0.6
    } else {
        cr
    };
    (f, cr)
}

/// Draws `F ~ Cauchy(mu_F, 0.1)` (redrawn while non-positive, capped at 1)
/// and `Cr ~ Normal(mu_Cr, 0.1)` clipped to `[0, 1]`, then applies the stage
/// constraints for `nfes`.
pub fn sample_f_cr(
    memory: &ParameterMemory,
    slot: usize,
    nfes: usize,
    max_nfes: usize,
    rng: &mut RngStream,
) -> (f64, f64) {
    let f = loop {
        let f = rng.cauchy(memory.mu_f[slot], PARAMETER_SPREAD);
        if f > 0.0 {
            break f.min(1.0);
        }
    };
    let cr = rng.normal(memory.mu_cr[slot], PARAMETER_SPREAD).clamp(0.0, 1.0);
    apply_stage_constraints(f, cr, nfes, max_nfes)
}

/// Ratio of the population given to the order-pbest operator, driven by the
/// mean fitness improvement each operator produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaState {
    pub gamma1: f64,
    pub omega_m1: f64,
    pub omega_m2: f64,
    pub n1: usize,
    pub n2: usize,
}

impl GammaState {
    pub fn new(gamma1: f64) -> Self {
        Self {
            gamma1,
            omega_m1: 0.0,
            omega_m2: 0.0,
            n1: 0,
            n2: 0,
        }
    }

    pub fn gamma2(&self) -> f64 {
        1.0 - self.gamma1
    }
}

fn mean_or_zero(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// `improvements1`/`improvements2` hold one entry per evaluated trial of each
/// operator: the fitness gain, or 0 when the trial did not improve. The new
/// split depends only on this generation's gains.
pub fn update_gamma(
    _previous: GammaState,
    improvements1: &[f64],
    improvements2: &[f64],
    gamma_min: f64,
) -> GammaState {
    let omega_m1 = mean_or_zero(improvements1);
    let omega_m2 = mean_or_zero(improvements2);
    let raw = if omega_m1 == 0.0 && omega_m2 == 0.0 {
        0.5
    } else {
        omega_m1 / (omega_m1 + omega_m2)
    };
    GammaState {
        gamma1: clamp_gamma(raw, gamma_min),
        omega_m1,
        omega_m2,
        n1: improvements1.len(),
        n2: improvements2.len(),
    }
}

/// `p = p_max (1 - 0.5 nfes / max_nfes)`.
pub fn p_schedule(p_max: f64, nfes: usize, max_nfes: usize) -> f64 {
    p_max * (1.0 - 0.5 * nfes as f64 / max_nfes as f64)
}

/// Size of the elite subset for fraction `p` of `n` members: `ceil(p n)`,
/// at least 2 and at most `n`.
pub fn elite_size(p: f64, n: usize) -> usize {
    ((p * n as f64).ceil() as usize).max(2).min(n)
}

/// Linear population-size schedule,
/// `round((n_min - n_max) / max_nfes * nfes + n_max)`, evaluated in exact
/// integer arithmetic with halves rounded up.
pub fn population_schedule(n_max: usize, n_min: usize, nfes: usize, max_nfes: usize) -> usize {
    let nfes = nfes.min(max_nfes) as u128;
    let den = max_nfes.max(1) as u128;
    let (n_max, n_min) = (n_max as u128, n_min as u128);
    if n_min >= n_max {
        // Growing schedules are not used; hold the start size.
        return n_max as usize;
    }
    // value = (n_max * den - (n_max - n_min) * nfes) / den, which is >= n_min.
    let numer = n_max * den - (n_max - n_min) * nfes;
    ((2 * numer + den) / (2 * den)) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn memory_initialization() {
        let m = ParameterMemory::new(5, 0.3, 0.8);
        assert_eq!(m.mu_f(), &[0.3, 0.3, 0.3, 0.3, 0.9]);
        assert_eq!(m.mu_cr(), &[0.8, 0.8, 0.8, 0.8, 0.9]);
        assert_eq!(m.slot_for_generation(1), 0);
        assert_eq!(m.slot_for_generation(5), 4);
        assert_eq!(m.slot_for_generation(6), 0);
    }

    #[test]
    fn stage_constraint_examples() {
        let max = 100_000;
        assert_eq!(apply_stage_constraints(0.5, 0.2, 10_000, max).1, 0.7);
        assert_eq!(apply_stage_constraints(0.5, 0.55, 40_000, max).1, 0.6);
        assert_eq!(apply_stage_constraints(0.95, 0.5, 70_000, max), (0.95, 0.5));
        assert_eq!(apply_stage_constraints(0.95, 0.9, 10_000, max), (0.7, 0.9));
    }

    #[test]
    fn sampled_parameters_in_range() {
        // mu_F = 0.05 puts a large share of raw Cauchy draws at or below zero,
        // exercising the redraw loop.
        let mut m = ParameterMemory::new(2, 0.05, 0.5);
        m.mu_cr[0] = 0.05;
        let mut rng = RngStream::new(4);
        for _ in 0..100_000 {
            let (f, cr) = sample_f_cr(&m, 0, 90_000, 100_000, &mut rng);
            assert!(f > 0.0 && f <= 1.0);
            assert!((0.0..=1.0).contains(&cr));
        }
    }

    #[test]
    fn lehmer_examples() {
        let mut m = ParameterMemory::new(5, 0.3, 0.8);
        let mut r = SuccessRecords::default();
        r.push(0.5, 0.5, 1.0);
        r.push(0.5, 0.5, 1.0);
        update_memory(&mut m, &r, 1);
        assert!((m.mu_f()[0] - 0.5).abs() < 1e-15);

        let mut r = SuccessRecords::default();
        r.push(0.2, 0.4, 2.0);
        r.push(0.8, 0.6, 2.0);
        update_memory(&mut m, &r, 2);
        assert!((m.mu_f()[1] - 0.68).abs() < 1e-15);
        assert!((m.mu_cr()[1] - 0.52).abs() < 1e-15);
    }

    #[test]
    fn empty_records_and_terminal_slot_leave_memory_unchanged() {
        let mut m = ParameterMemory::new(5, 0.3, 0.8);
        let before = m.clone();
        update_memory(&mut m, &SuccessRecords::default(), 1);
        assert_eq!(m, before);
        let mut r = SuccessRecords::default();
        r.push(0.1, 0.1, 1.0);
        update_memory(&mut m, &r, 5);
        assert_eq!(m, before);
    }

    #[test]
    fn all_zero_cr_successes_stay_finite() {
        let mut m = ParameterMemory::new(3, 0.3, 0.8);
        let mut r = SuccessRecords::default();
        r.push(0.4, 0.0, 1.0);
        update_memory(&mut m, &r, 1);
        assert_eq!(m.mu_cr()[0], 0.0);
        assert!((m.mu_f()[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let g = GammaState::new(0.5);
        assert_eq!(update_gamma(g, &[0.0, 0.0], &[0.0], 0.1).gamma1, 0.5);
        assert_eq!(update_gamma(g, &[], &[], 0.1).gamma1, 0.5);
        assert_eq!(update_gamma(g, &[3.0], &[1.0], 0.1).gamma1, 0.75);
        assert_eq!(update_gamma(g, &[6.0, 0.0], &[1.0, 1.0, 1.0], 0.1).gamma1, 0.75);
        assert_eq!(update_gamma(g, &[100.0], &[0.0], 0.1).gamma1, 0.9);
        assert_eq!(update_gamma(g, &[0.0], &[5.0], 0.1).gamma1, 0.1);
    }

    #[test]
    fn p_examples() {
        assert_eq!(p_schedule(0.25, 0, 1000), 0.25);
        assert_eq!(p_schedule(0.25, 1000, 1000), 0.125);
        assert_eq!(p_schedule(0.25, 500, 1000), 0.1875);
        assert_eq!(elite_size(0.25, 180), 45);
        assert_eq!(elite_size(0.125, 4), 2);
        assert_eq!(elite_size(1.0, 4), 4);
    }

    #[test]
    fn population_examples() {
        let max = 300_000;
        assert_eq!(population_schedule(540, 4, 0, max), 540);
        assert_eq!(population_schedule(540, 4, max, max), 4);
        assert_eq!(population_schedule(540, 4, max / 2, max), 272);
    }

    proptest! {
        #[test]
        fn terminal_slot_survives_updates(
            updates in proptest::collection::vec(
                (1usize..50, proptest::collection::vec((0.01f64..1.0, 0.0f64..1.0, 1e-6f64..1e3), 0..8)),
                1..30,
            )
        ) {
            let mut m = ParameterMemory::new(5, 0.3, 0.8);
            for (k, recs) in updates {
                let mut r = SuccessRecords::default();
                for (f, cr, d) in recs {
                    r.push(f, cr, d);
                }
                update_memory(&mut m, &r, k);
                prop_assert_eq!(m.mu_f()[4], TERMINAL_VALUE);
                prop_assert_eq!(m.mu_cr()[4], TERMINAL_VALUE);
                prop_assert!(m.mu_f().iter().chain(m.mu_cr()).all(|v| v.is_finite()));
            }
        }

        #[test]
        fn lehmer_mean_bounds(
            data in proptest::collection::vec((0.01f64..1.0, 1e-6f64..1e3), 1..40)
        ) {
            let values: Vec<f64> = data.iter().map(|d| d.0).collect();
            let raw: Vec<f64> = data.iter().map(|d| d.1).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
            let lehmer = weighted_lehmer_mean(&values, &weights).unwrap();
            let arith: f64 = values.iter().zip(&weights).map(|(v, w)| v * w).sum();
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lehmer >= lo - 1e-12 && lehmer <= hi + 1e-12);
            prop_assert!(lehmer >= arith - 1e-12);
        }

        #[test]
        fn schedules_non_increasing(
            n_max in 4usize..1000,
            max_nfes in 1usize..1_000_000,
            a in 0.0f64..=1.0,
            b in 0.0f64..=1.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let e1 = (lo * max_nfes as f64) as usize;
            let e2 = (hi * max_nfes as f64) as usize;
            prop_assert!(population_schedule(n_max, 4, e1, max_nfes) >= population_schedule(n_max, 4, e2, max_nfes));
            prop_assert!(p_schedule(0.25, e1, max_nfes) >= p_schedule(0.25, e2, max_nfes));
            prop_assert_eq!(population_schedule(n_max, 4, 0, max_nfes), n_max);
            prop_assert_eq!(population_schedule(n_max, 4, max_nfes, max_nfes), 4);
        }

        #[test]
        fn gamma_stays_clamped(
            a in proptest::collection::vec(0.0f64..100.0, 0..20),
            b in proptest::collection::vec(0.0f64..100.0, 0..20),
        ) {
            let g = update_gamma(GammaState::new(0.5), &a, &b, 0.1);
            prop_assert!((0.1..=0.9).contains(&g.gamma1));
            prop_assert!((g.gamma1 + g.gamma2() - 1.0).abs() < 1e-15);
        }

        #[test]
        fn sampled_pairs_obey_stages(
            mu_f in 0.05f64..1.0,
            mu_cr in 0.0f64..1.0,
            stage in 0usize..100,
            seed in any::<u64>(),
        ) {
            let max = 100;
            let mut m = ParameterMemory::new(2, mu_f, mu_cr);
            m.mu_cr[0] = mu_cr;
            let mut rng = RngStream::new(seed);
            let (f, cr) = sample_f_cr(&m, 0, stage, max, &mut rng);
            prop_assert!(f > 0.0 && f <= 1.0 && (0.0..=1.0).contains(&cr));
            if stage < 60 { prop_assert!(f <= 0.7); }
            if stage < 25 { prop_assert!(cr >= 0.7); } else if stage < 50 { prop_assert!(cr >= 0.6); }
        }
    }
}
