//! Experiment harness: instance generators, estimators and CSV reports.

pub mod estimate;
pub mod experiment;
pub mod gen;
pub mod stats;

pub use estimate::{
    estimate_contraction_sensitivity, estimate_lipschitz, estimate_lipschitz_between, run_algorithm, run_coupled,
    Algorithm, LipschitzEstimate, Metric,
};
pub use experiment::{run_experiment, AlgorithmId, ExperimentConfig, ExperimentReport, ExperimentRow};
pub use gen::{gen_instance, Instance, InstanceKind};
pub use stats::{chi_square_uniform_p, fit_linear, LinearFit, Summary};
