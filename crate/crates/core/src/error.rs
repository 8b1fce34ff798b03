use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("no data rows")]
    NoDataRows,

    #[error("row {row}: expected {expected} columns, found {found}")]
    RowArity {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}: unknown level {value:?} in categorical column {column:?}")]
    UnknownLevel {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: cannot parse {value:?} in numeric column {column:?}")]
    BadNumber {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}: target value {value:?} is not in the target map")]
    UnknownTarget { row: usize, value: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cholesky factorisation failed (smallest diagonal pivot estimate {min_pivot:e})")]
    NotPositiveDefinite { min_pivot: f64 },

    #[error("component {component} collapsed twice in a row at iteration {iteration}")]
    DegenerateComponent { component: usize, iteration: usize },

    #[error("relative error undefined: actual loss is zero")]
    ZeroActualLoss,

    #[error("budget {budget} infeasible; smallest achievable bound is {min_bound}")]
    InfeasibleBudget { budget: f64, min_bound: f64 },

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// True for failures of the numerical routines (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. }
                | Error::DegenerateComponent { .. }
                | Error::ZeroActualLoss
        )
    }

    /// Process exit status: 1 bad input, 2 numerical failure, 3 infeasible budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InfeasibleBudget { .. } => 3,
            e if e.is_numerical() => 2,
            _ => 1,
        }
    }
}
