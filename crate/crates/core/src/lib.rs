//! RDE: a differential evolution variant for single-objective
//! bound-constrained minimization, plus a batch experiment harness.
//!
//! The optimizer combines current-to-pbest/1 and current-to-order-pbest/1
//! mutation under an adaptive resource split, rank-based selective pressure
//! on every donor draw (archive included), success-history `F`/`Cr`
//! adaptation with a frozen terminal slot and staged caps, linear reduction
//! of `p` and of the population size, and Cauchy perturbation of inherited
//! coordinates. Every strategy can be switched off through [`RunConfig`].
//!
//! ```
//! use rde::{benchmarks::build_problem, optimizer::{run, RunConfig}};
//!
//! let problem = build_problem("sphere", 5, 1).unwrap();
//! let config = RunConfig::for_dimension(5).with_max_nfes(20_000).with_seed(7);
//! let result = run(&problem, &config).unwrap();
//! assert!(result.error < 1e-3);
//! ```

pub mod adaptation;
pub mod benchmarks;
pub mod error;
pub mod evaluator;
pub mod experiment;
pub mod mutation;
pub mod optimizer;
pub mod population;
pub mod pressure;
pub mod problem;
pub mod rng;
pub mod stats;
pub mod variation;

pub use error::{RdeError, Result};
pub use optimizer::{ablate, run, RunConfig, RunResult};
pub use problem::{Bounds, FnProblem, Problem};
pub use rng::RngStream;
