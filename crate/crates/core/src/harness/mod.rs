//! Config-driven experiments: calibrate, run repetitions of MC and IS
//! estimators in parallel, and report per-repetition estimates.

pub mod config;
pub mod experiment;
pub mod fixtures;
pub mod report;

pub use config::{Algorithm, ExperimentConfig, FunctionalSpec, ProposalMethod, Target};
pub use experiment::{run_experiment, Experiment, RepOutcome};
pub use report::{reduction_factor, ExperimentReport, CSV_HEADER};
