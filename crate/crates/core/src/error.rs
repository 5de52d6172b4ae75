//! Error type shared across the crate.
//!
//! Each variant maps to an exit-code category so the CLI can report a
//! stable nonzero code per error class.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient sample: need at least {needed} rows, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("sample covariance is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("Hessian is not positive definite at the reported solution; fit is not at a minimum")]
    NotAtMinimum,

    #[error("standard error for loading {0} is zero")]
    ZeroStandardError(usize),

    #[error("error variance {0} is not positive")]
    SingularErrorVariance(usize),

    #[error("regression needs at least {needed} usable points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("{file} row {row}: publication refers to unknown author '{author_id}'")]
    UnknownAuthor {
        file: String,
        row: usize,
        author_id: String,
    },

    #[error("{file} row {row}: negative citation count")]
    NegativeCitations { file: String, row: usize },

    #[error("{file} row {row}: author count must be at least 1")]
    InvalidAuthorCount { file: String, row: usize },

    #[error("{file} row {row}: duplicate author_id '{author_id}'")]
    DuplicateAuthor {
        file: String,
        row: usize,
        author_id: String,
    },

    #[error("{file} row {row}: {message}")]
    MalformedRow {
        file: String,
        row: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible synthetic-population parameters: {0}")]
    Infeasible(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Exit-code category for the CLI: 2 input validation, 3 numerical,
    /// 4 io/serialization, 5 configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownAuthor { .. }
            | Error::NegativeCitations { .. }
            | Error::InvalidAuthorCount { .. }
            | Error::DuplicateAuthor { .. }
            | Error::MalformedRow { .. }
            | Error::InsufficientSample { .. }
            | Error::InsufficientPoints { .. } => 2,
            Error::SingularCovariance(_)
            | Error::NotPositiveDefinite(_)
            | Error::NotAtMinimum
            | Error::ZeroStandardError(_)
            | Error::SingularErrorVariance(_)
            | Error::Infeasible(_) => 3,
            Error::Io { .. } | Error::Json(_) | Error::Csv(_) => 4,
            Error::Config(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
