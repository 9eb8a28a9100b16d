use std::fmt;

use thiserror::Error;

/// A single problem found while validating input records.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordIssue {
    /// Observation id, when the record had one.
    pub id: Option<String>,
    /// 1-based data row in the source file, when known.
    pub row: Option<usize>,
    pub message: String,
}

impl fmt::Display for RecordIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.row, &self.id) {
            (Some(row), Some(id)) => write!(f, "row {row} (id {id}): {}", self.message),
            (Some(row), None) => write!(f, "row {row}: {}", self.message),
            (None, Some(id)) => write!(f, "id {id}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

fn join_issues(issues: &[RecordIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("invalid records: {}", join_issues(.0))]
    InvalidRecords(Vec<RecordIssue>),

    #[error("need at least {required} periods, dataset has {found}")]
    TooFewPeriods { required: usize, found: usize },

    #[error("unknown period {0:?}")]
    UnknownPeriod(String),

    #[error("period {0:?} has no observations")]
    EmptyPeriod(String),

    #[error("unknown observation id {0:?}")]
    UnknownObservation(String),

    #[error("unknown characteristic {name:?}; available: {}", .available.join(", "))]
    UnknownCharacteristic {
        name: String,
        available: Vec<String>,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("rank-deficient design: column {column:?} is linearly dependent on earlier columns")]
    RankDeficient { column: String },

    #[error("not enough observations: {observations} rows for {columns} columns")]
    Underdetermined { observations: usize, columns: usize },

    #[error("zero residual degrees of freedom ({observations} observations, {columns} columns)")]
    NoResidualDegreesOfFreedom { observations: usize, columns: usize },

    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),

    #[error("characteristic {0:?} has zero variance")]
    ZeroVariance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message}")]
    Input { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
