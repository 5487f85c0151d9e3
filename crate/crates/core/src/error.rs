//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A decision vector violated its box bounds; callers must clip first.
    #[error("decision variable {index} = {value} outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("evaluation budget {budget} is smaller than the population size {population}")]
    BudgetTooSmall { budget: usize, population: usize },

    /// Too few training pairs to fit a regression model.
    #[error("inverse model needs at least 2 training pairs, got {0}")]
    DegenerateModel(usize),

    #[error("kernel matrix factorization failed (size {0})")]
    Factorization(usize),

    #[error("unknown problem '{0}'")]
    UnknownProblem(String),

    #[error("no reference-front oracle for '{name}': {reason}")]
    UnsupportedOracle { name: String, reason: String },

    #[error("rank-sum test needs at least 3 samples per group, got {0} and {1}")]
    TooFewSamples(usize, usize),

    #[error("hypervolume: {0}")]
    Hypervolume(String),
}
