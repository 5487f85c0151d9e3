//! Experiment harness: seeded repetitions over problems and algorithm
//! configurations, normalized hypervolume scoring, rank-sum comparison
//! tables, and SVG front plots.

pub mod baseline;
pub mod experiment;
pub mod plot;
pub mod summary;

pub use experiment::{
    run_and_write, run_experiment, write_outputs, AlgorithmKind, AlgorithmSpec, ExperimentConfig,
    RunOutcome, RunRecord,
};
pub use summary::{summarize, SummaryTable};
