//! The minimization problem interface consumed by the optimizers.

use crate::error::{RdeError, Result};

/// Per-dimension box constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(RdeError::DimensionMismatch {
                expected: lower.len(),
                actual: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(RdeError::config("bounds must have at least one dimension"));
        }
        for (j, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(RdeError::config(format!("bounds of dimension {j} are not finite")));
            }
            if lo >= hi {
                return Err(RdeError::config(format!(
                    "invalid bounds for dimension {j}: lower {lo} >= upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` in every dimension.
    pub fn uniform(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }
}

/// A bound-constrained objective to be minimized.
pub trait Problem: Sync {
    fn dim(&self) -> usize;

    fn bounds(&self) -> &Bounds;

    /// Objective value at `x`; callers guarantee `x.len() == self.dim()`.
    fn evaluate(&self, x: &[f64]) -> f64;

    /// Known optimal value, when there is one.
    fn optimum_value(&self) -> Option<f64> {
        None
    }
}

/// Adapts a plain closure into a [`Problem`].
pub struct FnProblem<F> {
    bounds: Bounds,
    f: F,
    optimum: Option<f64>,
}

impl<F> FnProblem<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pub fn new(bounds: Bounds, f: F) -> Self {
        Self {
            bounds,
            f,
            optimum: None,
        }
    }

    pub fn with_optimum(mut self, value: f64) -> Self {
        self.optimum = Some(value);
        self
    }
}

impl<F> Problem for FnProblem<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn optimum_value(&self) -> Option<f64> {
        self.optimum
    }
}
