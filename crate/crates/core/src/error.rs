use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column '{column}': cannot parse {value:?} as a finite number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("duplicate row id '{0}'")]
    DuplicateId(String),

    #[error("id column '{0}' not found in header")]
    MissingIdColumn(String),

    #[error("malformed csv: {0}")]
    Csv(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("projection basis is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("infeasible constraints on feature {feature}: {reason}")]
    Infeasible { feature: usize, reason: String },

    #[error("invalid constraint on feature {feature}: {reason}")]
    InvalidConstraint { feature: usize, reason: String },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("training diverged at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error("unknown point '{0}'")]
    UnknownPoint(String),

    #[error("unknown feature '{0}'")]
    UnknownFeature(String),
}
