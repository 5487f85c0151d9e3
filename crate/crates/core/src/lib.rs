//! Constrained multi-objective optimization by decomposition with
//! Gaussian-process inverse models (IM-C-MOEA/D).
//!
//! The library decomposes a constrained multi-objective problem into scalar
//! subproblems via a Das-Dennis weight lattice, partitions the population in
//! objective space, trains per-cluster univariate Gaussian-process inverse
//! models mapping objective values back to decision variables, and applies a
//! feasibility-first global replacement scheme.
//!
//! Entry points:
//! - [`algorithm::run`] drives a full optimization on any [`Problem`].
//! - [`problems::ProblemRegistry`] holds the built-in benchmark suite.
//! - [`metrics`] provides hypervolume and the Wilcoxon rank-sum test.

pub mod algorithm;
pub mod cluster;
pub mod error;
pub mod invmodel;
pub mod metrics;
pub mod problem;
pub mod problems;
pub mod scalarize;
pub mod weights;

pub use algorithm::{AlgoConfig, GenerationStats, ReplacementRule};
pub use error::{Error, Result};
pub use metrics::{HvMethod, HvResult, Verdict};
pub use problem::{
    constraint_violation, Evaluation, Evaluator, Population, Problem, ReferencePoint, Solution,
};
pub use problems::{ProblemRegistry, ProblemSpec};
pub use weights::WeightLattice;
