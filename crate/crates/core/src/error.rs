use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure space: {0}")]
    InvalidSpace(String),

    #[error("region or partition does not fit the space: {0}")]
    InvalidRegion(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: symmetry defect {defect:e} exceeds {allowed:e}")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("operator is not positive: eigenvalue {eigenvalue:e} below -{allowed:e}")]
    NotPositive { eigenvalue: f64, allowed: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("state has trace {trace}, unit trace required")]
    NotUnitTrace { trace: f64 },

    #[error("zero state")]
    ZeroState,

    #[error("state is not supported in the region: leakage {leak:e}")]
    NotConfined { leak: f64 },

    #[error("spectral function undefined at eigenvalue {0}")]
    FunctionUndefined(f64),

    #[error("invalid step function: {0}")]
    InvalidStep(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("partitions are not nested: {0}")]
    NotNested(String),

    #[error("invalid grid state: {0}")]
    InvalidGrid(String),

    #[error("invalid stencil: {0}")]
    InvalidStencil(String),

    #[error("box of {sites} sites exceeds the dense-matrix cap of {cap}")]
    TooLarge { sites: usize, cap: usize },

    #[error("unknown inequality id {0:?}")]
    UnknownInequality(String),

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
