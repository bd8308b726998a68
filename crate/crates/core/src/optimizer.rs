//! The RDE generation loop and its run configuration.

use serde::{Deserialize, Serialize};

use crate::adaptation::{
    elite_size, p_schedule, population_schedule, sample_f_cr, update_gamma, GammaState,
    MemoryIndex, ParameterMemory, SuccessRecords,
};
use crate::error::{RdeError, Result};
use crate::evaluator::{fitness_error, Evaluator, TracePoint};
use crate::mutation::{assign_strategies, mutate_ord_pbest, mutate_pbest, Strategy};
use crate::population::{archive_capacity, init_population, Candidate, ExternalArchive, MIN_POPULATION};
use crate::pressure::{RspSampler, RspScope};
use crate::problem::Problem;
use crate::rng::RngStream;
use crate::variation::{crossover_perturb, repair_bounds, select_survivor, PERTURB_SCALE};

/// Evaluations granted per dimension by default.
pub const NFES_PER_DIM: usize = 10_000;
/// Initial population per dimension by default.
pub const POP_PER_DIM: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbScaleMode {
    /// Scale 0.1 in problem units.
    Absolute,
    /// Scale 0.1 per 200 units of each dimension's range, so it matches
    /// `Absolute` on `[-100, 100]`.
    RangeRelative,
}

impl std::str::FromStr for PerturbScaleMode {
    type Err = RdeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(Self::Absolute),
            "range_relative" => Ok(Self::RangeRelative),
            other => Err(RdeError::config(format!("unknown perturb_scale_mode '{other}'"))),
        }
    }
}

/// When the elite fraction `p` is recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PUpdate {
    PerIndividual,
    PerGeneration,
}

impl std::str::FromStr for PUpdate {
    type Err = RdeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_individual" => Ok(Self::PerIndividual),
            "per_generation" => Ok(Self::PerGeneration),
            other => Err(RdeError::config(format!("unknown p_update '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dim: usize,
    pub max_nfes: usize,
    pub n_max: usize,
    pub n_min: usize,
    /// Number of success-history slots `H`.
    pub memory_size: usize,
    pub p_max: f64,
    /// Archive capacity relative to the current population size.
    pub archive_rate: f64,
    pub mu_f_init: f64,
    pub mu_cr_init: f64,
    pub gamma_init: f64,
    /// Rank greediness.
    pub k_r: f64,
    /// Probability of perturbing an inherited coordinate.
    pub p_r: f64,
    pub seed: u64,
    /// Sub-stream of `seed` used by this run.
    pub rng_stream: u64,

    pub enable_ord_pbest: bool,
    pub enable_rsp: bool,
    pub rsp_scope: RspScope,
    pub enable_cauchy_perturb: bool,
    pub enable_lpsr: bool,
    pub enable_p_reduction: bool,
    pub memory_index: MemoryIndex,
    /// `gamma1` is kept in `[gamma_clamp, 1 - gamma_clamp]`.
    pub gamma_clamp: f64,
    pub perturb_scale_mode: PerturbScaleMode,
    pub p_update: PUpdate,
}

/// Keys accepted by [`RunConfig::set`] and [`ablate`].
pub const CONFIG_KEYS: &[&str] = &[
    "dim",
    "max_nfes",
    "n_max",
    "n_min",
    "memory_size",
    "p_max",
    "archive_rate",
    "mu_f_init",
    "mu_cr_init",
    "gamma_init",
    "k_r",
    "p_r",
    "seed",
    "rng_stream",
    "enable_ord_pbest",
    "enable_rsp",
    "rsp_scope",
    "enable_cauchy_perturb",
    "enable_lpsr",
    "enable_p_reduction",
    "memory_index",
    "gamma_clamp",
    "perturb_scale_mode",
    "p_update",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| RdeError::config(format!("invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Default settings for a `dim`-dimensional problem.
    pub fn for_dimension(dim: usize) -> Self {
        Self {
            dim,
            max_nfes: NFES_PER_DIM * dim,
            n_max: POP_PER_DIM * dim,
            n_min: MIN_POPULATION,
            memory_size: 5,
            p_max: 0.25,
            archive_rate: 1.0,
            mu_f_init: 0.3,
            mu_cr_init: 0.8,
            gamma_init: 0.5,
            k_r: 3.0,
            p_r: 0.2,
            seed: 0,
            rng_stream: 0,
            enable_ord_pbest: true,
            enable_rsp: true,
            rsp_scope: RspScope::All,
            enable_cauchy_perturb: true,
            enable_lpsr: true,
            enable_p_reduction: true,
            memory_index: MemoryIndex::Cyclic,
            gamma_clamp: 0.1,
            perturb_scale_mode: PerturbScaleMode::Absolute,
            p_update: PUpdate::PerIndividual,
        }
    }

    /// Single-operator variant with rank pressure on `r1`/`r2` only and no
    /// perturbation.
    pub fn lshade_rsp_like(dim: usize) -> Self {
        Self {
            enable_ord_pbest: false,
            enable_cauchy_perturb: false,
            rsp_scope: RspScope::R1r2,
            ..Self::for_dimension(dim)
        }
    }

    /// Every strategy specific to RDE switched off.
    pub fn lshade_like(dim: usize) -> Self {
        Self {
            enable_ord_pbest: false,
            enable_rsp: false,
            enable_cauchy_perturb: false,
            rsp_scope: RspScope::R1r2,
            ..Self::for_dimension(dim)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_nfes(mut self, max_nfes: usize) -> Self {
        self.max_nfes = max_nfes;
        self
    }

    /// Rank greediness actually applied; 0 when rank pressure is disabled.
    pub fn effective_k_r(&self) -> f64 {
        if self.enable_rsp {
            self.k_r
        } else {
            0.0
        }
    }

    pub fn effective_p_r(&self) -> f64 {
        if self.enable_cauchy_perturb {
            self.p_r
        } else {
            0.0
        }
    }

    /// Sets one field by name from its textual value. Changing `dim` also
    /// rescales `max_nfes` and `n_max` when they still hold their
    /// dimension-derived defaults.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "dim" => {
                let dim: usize = parse(key, value)?;
                if self.max_nfes == NFES_PER_DIM * self.dim {
                    self.max_nfes = NFES_PER_DIM * dim;
                }
                if self.n_max == POP_PER_DIM * self.dim {
                    self.n_max = POP_PER_DIM * dim;
                }
                self.dim = dim;
            }
            "max_nfes" => self.max_nfes = parse(key, value)?,
            "n_max" => self.n_max = parse(key, value)?,
            "n_min" => self.n_min = parse(key, value)?,
            "memory_size" => self.memory_size = parse(key, value)?,
            "p_max" => self.p_max = parse(key, value)?,
            "archive_rate" => self.archive_rate = parse(key, value)?,
            "mu_f_init" => self.mu_f_init = parse(key, value)?,
            "mu_cr_init" => self.mu_cr_init = parse(key, value)?,
            "gamma_init" => self.gamma_init = parse(key, value)?,
            "k_r" => self.k_r = parse(key, value)?,
            "p_r" => self.p_r = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "rng_stream" => self.rng_stream = parse(key, value)?,
            "enable_ord_pbest" => self.enable_ord_pbest = parse(key, value)?,
            "enable_rsp" => self.enable_rsp = parse(key, value)?,
            "rsp_scope" => self.rsp_scope = value.trim().parse()?,
            "enable_cauchy_perturb" => self.enable_cauchy_perturb = parse(key, value)?,
            "enable_lpsr" => self.enable_lpsr = parse(key, value)?,
            "enable_p_reduction" => self.enable_p_reduction = parse(key, value)?,
            "memory_index" => self.memory_index = value.trim().parse()?,
            "gamma_clamp" => self.gamma_clamp = parse(key, value)?,
            "perturb_scale_mode" => self.perturb_scale_mode = value.trim().parse()?,
            "p_update" => self.p_update = value.trim().parse()?,
            other => {
                return Err(RdeError::config(format!(
                    "unknown configuration key '{other}'"
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(RdeError::Config(msg));
        if self.dim == 0 {
            return fail("dim must be at least 1".into());
        }
        if self.n_min < MIN_POPULATION {
            return fail(format!("n_min must be at least {MIN_POPULATION}"));
        }
        if self.n_max < self.n_min {
            return fail(format!("n_max {} is below n_min {}", self.n_max, self.n_min));
        }
        if self.max_nfes <= self.n_max {
            return fail(format!(
                "max_nfes {} must exceed the initial population {}",
                self.max_nfes, self.n_max
            ));
        }
        if self.memory_size == 0 {
            return fail("memory_size must be at least 1".into());
        }
        if !(self.p_max > 0.0 && self.p_max <= 1.0) {
            return fail(format!("p_max must lie in (0, 1], got {}", self.p_max));
        }
        if !(self.archive_rate >= 0.0 && self.archive_rate.is_finite()) {
            return fail(format!("archive_rate must be >= 0, got {}", self.archive_rate));
        }
        if !(self.mu_f_init > 0.0 && self.mu_f_init <= 1.0) {
            return fail(format!("mu_f_init must lie in (0, 1], got {}", self.mu_f_init));
        }
        for (name, v) in [
            ("mu_cr_init", self.mu_cr_init),
            ("gamma_init", self.gamma_init),
            ("p_r", self.p_r),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.k_r >= 0.0 && self.k_r.is_finite()) {
            return fail(format!("k_r must be >= 0, got {}", self.k_r));
        }
        if !(0.0..=0.5).contains(&self.gamma_clamp) {
            return fail(format!("gamma_clamp must lie in [0, 0.5], got {}", self.gamma_clamp));
        }
        Ok(())
    }
}

/// Returns a copy of `config` with the named fields overridden.
pub fn ablate<K, V>(config: &RunConfig, overrides: &[(K, V)]) -> Result<RunConfig>
where
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut out = config.clone();
    for (k, v) in overrides {
        out.set(k.as_ref(), v.as_ref())?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Candidate,
    /// Best fitness minus the known optimum, floored to 0 below 1e-8.
    pub error: f64,
    pub nfes_used: usize,
    pub generations: usize,
    pub final_population: usize,
    pub trace: Vec<TracePoint>,
}

/// Per-generation bookkeeping collected during one pass over the population.
#[derive(Debug, Default)]
pub struct GenerationStats {
    pub evaluated: usize,
    pub successes: usize,
    pub population_size: usize,
    pub archive_size: usize,
    pub gamma1: f64,
}

fn perturbation_scales(problem: &(impl Problem + ?Sized), mode: PerturbScaleMode) -> Vec<f64> {
    let b = problem.bounds();
    match mode {
        PerturbScaleMode::Absolute => vec![PERTURB_SCALE; problem.dim()],
        PerturbScaleMode::RangeRelative => b
            .lower()
            .iter()
            .zip(b.upper())
            .map(|(lo, hi)| PERTURB_SCALE * (hi - lo) / 200.0)
            .collect(),
    }
}

/// Minimizes `problem` with RDE.
pub fn run<P: Problem + ?Sized>(problem: &P, config: &RunConfig) -> Result<RunResult> {
    run_observed(problem, config, |_| {})
}

/// Like [`run`], calling `observer` after every generation.
pub fn run_observed<P, O>(problem: &P, config: &RunConfig, mut observer: O) -> Result<RunResult>
where
    P: Problem + ?Sized,
    O: FnMut(&GenerationStats),
{
    config.validate()?;
    if problem.dim() != config.dim {
        return Err(RdeError::DimensionMismatch {
            expected: config.dim,
            actual: problem.dim(),
        });
    }

    let mut rng = RngStream::with_stream(config.seed, config.rng_stream);
    let mut eval = Evaluator::new(problem, config.max_nfes);
    let mut pop = init_population(&mut eval, config.n_max, &mut rng)?;
    let mut archive = ExternalArchive::new(archive_capacity(config.archive_rate, pop.len()));
    let mut memory = ParameterMemory::new(config.memory_size, config.mu_f_init, config.mu_cr_init);
    let mut gamma = GammaState::new(config.gamma_init);
    let k_r = config.effective_k_r();
    let p_r = config.effective_p_r();
    let scales = perturbation_scales(problem, config.perturb_scale_mode);
    let bounds = problem.bounds();
    let max_nfes = config.max_nfes;
    let p_at = |nfes: usize| {
        if config.enable_p_reduction {
            p_schedule(config.p_max, nfes, max_nfes)
        } else {
            config.p_max
        }
    };

    let mut generation = 0usize;
    let mut records = SuccessRecords::default();
    let mut gains_order = Vec::new();
    let mut gains_pbest = Vec::new();
    let mut defeated = Vec::new();

    while !eval.exhausted() {
        generation += 1;
        let n = pop.len();
        let labels = if config.enable_ord_pbest {
            assign_strategies(n, gamma.gamma1, config.gamma_clamp, &mut rng).labels
        } else {
            vec![Strategy::Pbest; n]
        };
        let mut sampler = RspSampler::new(&pop, &archive, k_r, config.rsp_scope)?;
        let generation_slot = memory.slot_for_generation(generation);
        let generation_p = p_at(eval.nfes());

        let mut next: Vec<Candidate> = pop.members().to_vec();
        records.clear();
        gains_order.clear();
        gains_pbest.clear();
        defeated.clear();

        for (i, &strategy) in labels.iter().enumerate() {
            if eval.exhausted() {
                break;
            }
            let p = match config.p_update {
                PUpdate::PerIndividual => p_at(eval.nfes()),
                PUpdate::PerGeneration => generation_p,
            };
            let slot = match config.memory_index {
                MemoryIndex::Cyclic => generation_slot,
                MemoryIndex::Random => rng.index(memory.size()),
            };
            let (f, cr) = sample_f_cr(&memory, slot, eval.nfes(), max_nfes, &mut rng);
            let picks = sampler.sample(i, elite_size(p, n), &mut rng)?;

            let target = pop.get(i);
            let pbest = pop.get(picks.pbest);
            let r1 = pop.get(picks.r1);
            let r2 = picks.r2.resolve(&pop, &archive);
            let mutant = match strategy {
                Strategy::OrderPbest => mutate_ord_pbest(
                    &target.x,
                    f,
                    [
                        (&pbest.x, pbest.fitness),
                        (&r1.x, r1.fitness),
                        (&r2.x, r2.fitness),
                    ],
                ),
                Strategy::Pbest => mutate_pbest(&target.x, f, &pbest.x, &r1.x, &r2.x),
            };
            let mut trial = crossover_perturb(&target.x, &mutant, cr, p_r, &scales, &mut rng);
            repair_bounds(&mut trial, &target.x, bounds);
            let trial_fitness = eval.evaluate(&trial).expect("budget checked above");

            let outcome = select_survivor(target.fitness, trial_fitness);
            match strategy {
                Strategy::OrderPbest => gains_order.push(outcome.improvement),
                Strategy::Pbest => gains_pbest.push(outcome.improvement),
            }
            if outcome.success {
                records.push(f, cr, outcome.improvement);
                defeated.push(target.clone());
            }
            if outcome.offspring_survives {
                next[i] = Candidate::evaluated(trial, trial_fitness);
            }
        }

        for parent in defeated.drain(..) {
            archive.insert(parent, &mut rng);
        }
        memory.update_slot(generation_slot, &records);
        if config.enable_ord_pbest {
            gamma = update_gamma(gamma, &gains_order, &gains_pbest, config.gamma_clamp);
        }
        pop.replace(next);
        if config.enable_lpsr {
            let target = population_schedule(config.n_max, config.n_min, eval.nfes(), max_nfes);
            if target < pop.len() {
                pop.truncate(target);
                archive.resize(archive_capacity(config.archive_rate, pop.len()), &mut rng);
            }
        }

        observer(&GenerationStats {
            evaluated: gains_order.len() + gains_pbest.len(),
            successes: records.len(),
            population_size: pop.len(),
            archive_size: archive.len(),
            gamma1: gamma.gamma1,
        });
    }

    let nfes_used = eval.nfes();
    let trace = eval.into_trace();
    let best = pop.best().expect("population is never empty").clone();
    Ok(RunResult {
        error: fitness_error(best.fitness, problem.optimum_value()),
        best,
        nfes_used,
        generations: generation,
        final_population: pop.len(),
        trace,
    })
}
