use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset is empty after cleaning")]
    EmptyDataset,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid feature subset: {0}")]
    InvalidSubset(String),

    #[error("feature {feature}: class {class} has {count} instance(s), at least 2 are required")]
    InsufficientClassSize {
        feature: usize,
        class: &'static str,
        count: usize,
    },

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("invalid training parameter: {0}")]
    InvalidParameter(String),

    #[error("SMO did not converge after {iterations} pair updates (worst KKT violation {worst_violation:e})")]
    ConvergenceFailure {
        iterations: u64,
        worst_violation: f64,
    },

    #[error("shape mismatch: expected {expected} features, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("model/dataset mismatch: {0}")]
    Consistency(String),

    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("model invariant violated: {0}")]
    ModelInvariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
