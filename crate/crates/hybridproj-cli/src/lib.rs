//! Experiment harness for the hybrid projection solvers: JSON problem
//! definitions, runners, instance generation, oracle verification, and trace
//! emission.

pub mod experiment;
pub mod generate;
pub mod report;

pub use experiment::{load_experiment, run_experiment, ExperimentSpec, RunnerKind};
pub use generate::{generate_instance, Template};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<hybridproj::Error> for HarnessError {
    fn from(e: hybridproj::Error) -> Self {
        match e {
            hybridproj::Error::Infeasible(_)
            | hybridproj::Error::IterationCap(_)
            | hybridproj::Error::ProjectionFailure(_)
            | hybridproj::Error::ResolventFailure(_) => HarnessError::Solver(e.to_string()),
            other => HarnessError::Validation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Process exit codes: 0 success, 2 validation error, 3 solver failure.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
