//! Run summaries, the two-sided Wilcoxon rank-sum test and win/tie/loss
//! tallies.

use statrs::function::erf::erfc;

use crate::error::{RdeError, Result};
use crate::evaluator::ERROR_FLOOR;

/// Smallest sample accepted on either side of a rank-sum comparison.
pub const MIN_SAMPLES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for a single sample.
    pub sd: f64,
}

fn floor_error(e: f64) -> f64 {
    if e < ERROR_FLOOR {
        0.0
    } else {
        e
    }
}

/// Mean and sample standard deviation of errors, each floored to 0 below
/// 1e-8 first.
pub fn summarize(errors: &[f64]) -> Result<Summary> {
    if errors.is_empty() {
        return Err(RdeError::Usage("cannot summarize an empty sample".into()));
    }
    let values: Vec<f64> = errors.iter().copied().map(floor_error).collect();
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    };
    Ok(Summary { n, mean, sd })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// The first sample is significantly better (lower).
    Better,
    Tie,
    /// The first sample is significantly worse.
    Worse,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Better => "+",
            Verdict::Tie => "=",
            Verdict::Worse => "-",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "+" => Some(Verdict::Better),
            "=" => Some(Verdict::Tie),
            "-" => Some(Verdict::Worse),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Verdict::Better => Verdict::Worse,
            Verdict::Tie => Verdict::Tie,
            Verdict::Worse => Verdict::Better,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// Mann-Whitney U of the first sample.
    pub u: f64,
    pub z: f64,
    pub p_value: f64,
    pub mean_rank_a: f64,
    pub mean_rank_b: f64,
}

/// Mid-ranks (1-based) of `values`; tied values share the average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Two-sided rank-sum test using the normal approximation with tie and
/// continuity corrections.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    if a.len() < MIN_SAMPLES || b.len() < MIN_SAMPLES {
        return Err(RdeError::Usage(format!(
            "rank-sum test needs at least {MIN_SAMPLES} samples per side, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
    let rank_sum_b: f64 = ranks[a.len()..].iter().sum();
    let u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;

    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let mean_u = n1 * n2 / 2.0;
    let var_u = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    let (z, p_value) = if var_u <= 0.0 {
        (0.0, 1.0)
    } else {
        let diff = u - mean_u;
        let corrected = (diff.abs() - 0.5).max(0.0) * diff.signum();
        let z = corrected / var_u.sqrt();
        (z, erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0))
    };
    Ok(RankSumTest {
        u,
        z,
        p_value,
        mean_rank_a: rank_sum_a / n1,
        mean_rank_b: rank_sum_b / n2,
    })
}

/// `+` when `a` is significantly lower than `b` at level `alpha`, `-` when
/// significantly higher, `=` otherwise.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<Verdict> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RdeError::Usage(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let test = rank_sum_test(a, b)?;
    if a.iter().chain(b).all(|&v| v == a[0]) || test.p_value >= alpha {
        return Ok(Verdict::Tie);
    }
    Ok(if test.mean_rank_a < test.mean_rank_b {
        Verdict::Better
    } else {
        Verdict::Worse
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WinTieLoss {
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

impl WinTieLoss {
    pub fn total(&self) -> usize {
        self.wins + self.ties + self.losses
    }
}

impl std::fmt::Display for WinTieLoss {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{}", self.wins, self.ties, self.losses)
    }
}

pub fn wtl_table(verdicts: &[Verdict]) -> WinTieLoss {
    verdicts.iter().fold(WinTieLoss::default(), |mut acc, v| {
        match v {
            Verdict::Better => acc.wins += 1,
            Verdict::Tie => acc.ties += 1,
            Verdict::Worse => acc.losses += 1,
        }
        acc
    })
}
