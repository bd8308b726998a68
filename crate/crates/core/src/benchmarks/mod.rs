//! Desk-scale benchmark problems: unimodal, multimodal, hybrid and
//! composition classes built from [`BaseFunction`]s with locally generated
//! shift and rotation data. All problems have optimum value 0.

mod functions;
mod transform;

pub use functions::BaseFunction;
pub use transform::{format_rows, make_rotation, parse_rows, Matrix, Transform};

use crate::error::{RdeError, Result};
use crate::problem::{Bounds, Problem};
use crate::rng::RngStream;

/// Default search box half-width.
pub const SEARCH_RANGE: f64 = 100.0;
/// Shift vectors are drawn from `[-SHIFT_RANGE, SHIFT_RANGE]`.
pub const SHIFT_RANGE: f64 = 80.0;

/// Variables permuted and split into blocks, each block fed to its own base
/// function.
#[derive(Debug, Clone, PartialEq)]
pub struct Hybrid {
    pub permutation: Vec<usize>,
    pub blocks: Vec<(BaseFunction, usize)>,
}

impl Hybrid {
    /// Block sizes `ceil(fraction * dim)` for all but the last block, which
    /// takes the remainder.
    pub fn new(dim: usize, parts: &[(BaseFunction, f64)], rng: &mut RngStream) -> Self {
        let mut permutation: Vec<usize> = (0..dim).collect();
        rng.shuffle(&mut permutation);
        let mut blocks = Vec::with_capacity(parts.len());
        let mut used = 0;
        for (k, &(f, frac)) in parts.iter().enumerate() {
            let size = if k + 1 == parts.len() {
                dim - used
            } else {
                ((frac * dim as f64).ceil() as usize).min(dim - used)
            };
            used += size;
            blocks.push((f, size));
        }
        Self {
            permutation,
            blocks,
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let permuted: Vec<f64> = self.permutation.iter().map(|&j| z[j]).collect();
        let mut start = 0;
        let mut total = 0.0;
        for &(f, size) in &self.blocks {
            total += f.eval(&permuted[start..start + size]);
            start += size;
        }
        total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub base: BaseFunction,
    pub transform: Transform,
    pub sigma: f64,
    pub lambda: f64,
    pub bias: f64,
}

/// Distance-weighted blend of shifted base functions. The first component
/// carries bias 0 and holds the global optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition {
    pub components: Vec<Component>,
}

impl Composition {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = x.len() as f64;
        let mut weights = Vec::with_capacity(self.components.len());
        let mut values = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let dist2: f64 = x
                .iter()
                .zip(&c.transform.shift)
                .map(|(a, o)| (a - o).powi(2))
                .sum();
            let value = c.lambda * c.base.eval(&c.transform.apply(x)) + c.bias;
            if dist2 == 0.0 {
                return value;
            }
            weights.push((-dist2 / (2.0 * d * c.sigma * c.sigma)).exp() / dist2.sqrt());
            values.push(value);
        }
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            return values.iter().sum::<f64>() / values.len() as f64;
        }
        weights.iter().zip(&values).map(|(w, v)| w * v).sum::<f64>() / total
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Landscape {
    Base(BaseFunction),
    Hybrid(Hybrid),
    Composition(Composition),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveFunction {
    name: String,
    bounds: Bounds,
    landscape: Landscape,
    transform: Option<Transform>,
    f_opt: f64,
}

impl ObjectiveFunction {
    pub fn new(
        name: impl Into<String>,
        bounds: Bounds,
        landscape: Landscape,
        transform: Option<Transform>,
    ) -> Result<Self> {
        if let Some(t) = &transform {
            if t.dim() != bounds.dim() {
                return Err(RdeError::DimensionMismatch {
                    expected: bounds.dim(),
                    actual: t.dim(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            bounds,
            landscape,
            transform,
            f_opt: 0.0,
        })
    }

    /// Untransformed base function on `[-100, 100]^dim`.
    pub fn plain(base: BaseFunction, dim: usize) -> Result<Self> {
        Self::new(
            base.name(),
            Bounds::uniform(dim, -SEARCH_RANGE, SEARCH_RANGE)?,
            Landscape::Base(base),
            None,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn landscape(&self) -> &Landscape {
        &self.landscape
    }

    pub fn transform(&self) -> Option<&Transform> {
        self.transform.as_ref()
    }

    pub fn f_opt(&self) -> f64 {
        self.f_opt
    }

    /// A point attaining `f_opt`.
    pub fn optimizer(&self) -> Vec<f64> {
        match (&self.landscape, &self.transform) {
            (Landscape::Composition(c), _) => c.components[0].transform.shift.clone(),
            (_, Some(t)) => t.shift.clone(),
            (_, None) => vec![0.0; self.bounds.dim()],
        }
    }

    /// Objective value at transformed coordinates `z`.
    pub fn eval_transformed(&self, z: &[f64]) -> f64 {
        match &self.landscape {
            Landscape::Base(f) => f.eval(z),
            Landscape::Hybrid(h) => h.eval(z),
            Landscape::Composition(c) => c.eval(z),
        }
    }

    pub fn try_evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.bounds.dim() {
            return Err(RdeError::DimensionMismatch {
                expected: self.bounds.dim(),
                actual: x.len(),
            });
        }
        Ok(self.evaluate(x))
    }
}

impl Problem for ObjectiveFunction {
    fn dim(&self) -> usize {
        self.bounds.dim()
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let value = match &self.transform {
            Some(t) => self.eval_transformed(&t.apply(x)),
            None => self.eval_transformed(x),
        };
        value + self.f_opt
    }

    fn optimum_value(&self) -> Option<f64> {
        Some(self.f_opt)
    }
}

/// Names accepted by [`build_problem`], in stream order.
pub const PROBLEM_NAMES: &[&str] = &[
    "sphere",
    "elliptic",
    "zakharov",
    "rastrigin",
    "ackley",
    "griewank",
    "schwefel",
    "rosenbrock",
    "levy",
    "hybrid",
    "composition",
];

/// Six multimodal and hybrid problems used for algorithm comparisons.
pub const DESK_SUITE: &[&str] = &[
    "rastrigin",
    "ackley",
    "griewank",
    "schwefel",
    "rosenbrock",
    "hybrid",
];

/// Block layout of the `hybrid` problem.
pub const HYBRID_PARTS: [(BaseFunction, f64); 3] = [
    (BaseFunction::Zakharov, 0.2),
    (BaseFunction::Rosenbrock, 0.4),
    (BaseFunction::Rastrigin, 0.4),
];

fn random_transform(dim: usize, rng: &mut RngStream) -> Transform {
    let shift = (0..dim)
        .map(|_| rng.uniform_in(-SHIFT_RANGE, SHIFT_RANGE))
        .collect();
    Transform::new(shift, make_rotation(dim, rng)).expect("dimensions agree")
}

/// Shifted and rotated instance of a named problem. The same
/// `(name, dim, instance_seed)` always yields the same instance.
pub fn build_problem(name: &str, dim: usize, instance_seed: u64) -> Result<ObjectiveFunction> {
    let id = PROBLEM_NAMES
        .iter()
        .position(|&n| n == name)
        .ok_or_else(|| RdeError::config(format!("unknown problem '{name}'")))?;
    if dim == 0 {
        return Err(RdeError::config("problem dimension must be at least 1"));
    }
    let mut rng = RngStream::with_stream(instance_seed, id as u64 + 1);
    let bounds = Bounds::uniform(dim, -SEARCH_RANGE, SEARCH_RANGE)?;
    match name {
        "hybrid" => {
            let transform = random_transform(dim, &mut rng);
            let hybrid = Hybrid::new(dim, &HYBRID_PARTS, &mut rng);
            ObjectiveFunction::new(name, bounds, Landscape::Hybrid(hybrid), Some(transform))
        }
        "composition" => {
            let specs = [
                (BaseFunction::Rastrigin, 10.0, 1.0, 0.0),
                (BaseFunction::Griewank, 20.0, 10.0, 100.0),
                (BaseFunction::Schwefel, 30.0, 1.0, 200.0),
            ];
            let components = specs
                .iter()
                .map(|&(base, sigma, lambda, bias)| Component {
                    base,
                    transform: random_transform(dim, &mut rng),
                    sigma,
                    lambda,
                    bias,
                })
                .collect();
            ObjectiveFunction::new(
                name,
                bounds,
                Landscape::Composition(Composition { components }),
                None,
            )
        }
        base => {
            let base = BaseFunction::from_name(base).expect("listed in PROBLEM_NAMES");
            let transform = random_transform(dim, &mut rng);
            ObjectiveFunction::new(name, bounds, Landscape::Base(base), Some(transform))
        }
    }
}
