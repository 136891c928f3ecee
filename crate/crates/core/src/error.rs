use thiserror::Error;

/// Errors produced anywhere in the ingest → ordination → biplot pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("domain error at line {line}: {message}")]
    Domain { line: u64, message: String },

    #[error("empty table")]
    EmptyTable,

    #[error("degenerate table: {0}")]
    Degenerate(String),

    #[error("missing variable data for countries: {}", .0.join(", "))]
    MissingVariables(Vec<String>),

    #[error("variable `{0}` has zero weighted variance")]
    ConstantVariable(String),

    #[error("over-parameterized: {variables} variables plus constant exceed {countries} countries")]
    OverParameterized { variables: usize, countries: usize },

    #[error("collinear country variables: smallest singular value of Y'WY is {smallest_singular_value:e}")]
    Collinear { smallest_singular_value: f64 },

    #[error("specialization graph is disconnected into {} components", .components.len())]
    Disconnected { components: Vec<Vec<String>> },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("unknown product categories: {}", .0.join(", "))]
    UnknownCategory(Vec<String>),

    #[error("output error: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for this error class. Zero is never returned.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) => 2,
            Error::Io(_) => 3,
            Error::Parse { .. } => 4,
            Error::Domain { .. }
            | Error::EmptyTable
            | Error::Degenerate(_)
            | Error::MissingVariables(_)
            | Error::ConstantVariable(_)
            | Error::OverParameterized { .. }
            | Error::UnknownCategory(_) => 5,
            Error::Collinear { .. } => 6,
            Error::Disconnected { .. } => 7,
            Error::Convergence { .. } => 8,
            Error::Numerical(_) => 9,
            Error::Output(_) => 10,
        }
    }
}
