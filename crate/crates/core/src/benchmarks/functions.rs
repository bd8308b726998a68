//! Base test functions on transformed coordinates. Each has its global
//! minimum 0 at `z = 0`; internal scalings map the common `[-100, 100]`
//! search box onto each function's natural domain.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseFunction {
    Sphere,
    Elliptic,
    Zakharov,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel,
    Rosenbrock,
    Levy,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 9] = [
        BaseFunction::Sphere,
        BaseFunction::Elliptic,
        BaseFunction::Zakharov,
        BaseFunction::Rastrigin,
        BaseFunction::Ackley,
        BaseFunction::Griewank,
        BaseFunction::Schwefel,
        BaseFunction::Rosenbrock,
        BaseFunction::Levy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Sphere => "sphere",
            BaseFunction::Elliptic => "elliptic",
            BaseFunction::Zakharov => "zakharov",
            BaseFunction::Rastrigin => "rastrigin",
            BaseFunction::Ackley => "ackley",
            BaseFunction::Griewank => "griewank",
            BaseFunction::Schwefel => "schwefel",
            BaseFunction::Rosenbrock => "rosenbrock",
            BaseFunction::Levy => "levy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn is_unimodal(self) -> bool {
        matches!(
            self,
            BaseFunction::Sphere | BaseFunction::Elliptic | BaseFunction::Zakharov
        )
    }

    pub fn eval(self, z: &[f64]) -> f64 {
        if z.is_empty() {
            return 0.0;
        }
        match self {
            BaseFunction::Sphere => sphere(z),
            BaseFunction::Elliptic => elliptic(z),
            BaseFunction::Zakharov => zakharov(z),
            BaseFunction::Rastrigin => rastrigin(z),
            BaseFunction::Ackley => ackley(z),
            BaseFunction::Griewank => griewank(z),
            BaseFunction::Schwefel => schwefel(z),
            BaseFunction::Rosenbrock => rosenbrock(z),
            BaseFunction::Levy => levy(z),
        }
    }
}

pub fn sphere(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

pub fn elliptic(z: &[f64]) -> f64 {
    let d = z.len();
    if d == 1 {
        return z[0] * z[0];
    }
    z.iter()
        .enumerate()
        .map(|(i, v)| 1e6f64.powf(i as f64 / (d - 1) as f64) * v * v)
        .sum()
}

pub fn zakharov(z: &[f64]) -> f64 {
    let s1: f64 = z.iter().map(|v| v * v).sum();
    let s2: f64 = z
        .iter()
        .enumerate()
        .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
        .sum();
    s1 + s2.powi(2) + s2.powi(4)
}

pub fn rastrigin(z: &[f64]) -> f64 {
    z.iter()
        .map(|v| {
            let y = v * 0.0512;
            y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
        })
        .sum()
}

pub fn ackley(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
    let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
    let value = -20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E;
    // Rounding leaves a residue of a few ulps at the optimum.
    value.max(0.0)
}

pub fn griewank(z: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for (i, v) in z.iter().enumerate() {
        let y = v * 6.0;
        sum += y * y;
        prod *= (y / ((i + 1) as f64).sqrt()).cos();
    }
    sum / 4000.0 - prod + 1.0
}

const SCHWEFEL_OFFSET: f64 = 420.968_746_227_503_6;

fn schwefel_term(y: f64, d: f64) -> f64 {
    if y.abs() <= 500.0 {
        y * y.abs().sqrt().sin()
    } else if y > 500.0 {
        let m = 500.0 - y % 500.0;
        m * m.abs().sqrt().sin() - (y - 500.0).powi(2) / (10_000.0 * d)
    } else {
        let m = y.abs() % 500.0 - 500.0;
        m * m.abs().sqrt().sin() - (y + 500.0).powi(2) / (10_000.0 * d)
    }
}

/// Modified Schwefel with a quadratic penalty outside `[-500, 500]`.
pub fn schwefel(z: &[f64]) -> f64 {
    let d = z.len() as f64;
    let peak = schwefel_term(SCHWEFEL_OFFSET, d);
    z.iter()
        .map(|v| peak - schwefel_term(v * 10.0 + SCHWEFEL_OFFSET, d))
        .sum()
}

pub fn rosenbrock(z: &[f64]) -> f64 {
    let y: Vec<f64> = z.iter().map(|v| v * 0.02048 + 1.0).collect();
    y.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn levy(z: &[f64]) -> f64 {
    let w: Vec<f64> = z.iter().map(|v| 1.0 + v / 4.0).collect();
    let d = w.len();
    let head = (PI * w[0]).sin().powi(2);
    let body: f64 = w[..d - 1]
        .iter()
        .map(|&wi| (wi - 1.0).powi(2) * (1.0 + 10.0 * (PI * wi + 1.0).sin().powi(2)))
        .sum();
    let wd = w[d - 1];
    let tail = (wd - 1.0).powi(2) * (1.0 + (2.0 * PI * wd).sin().powi(2));
    head + body + tail
}
