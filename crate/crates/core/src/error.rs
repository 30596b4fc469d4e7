use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    Domain,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed table: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: expected {expected} cells, found {found}")]
    Ragged {
        row: u64,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column `{column}`: missing value")]
    MissingValue { row: u64, column: String },

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a real number")]
    NotANumber {
        row: u64,
        column: String,
        value: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unknown {what} `{name}`")]
    Lookup { what: &'static str, name: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ground set has {size} descriptors, above the enumeration cap of {cap}; vc_of_object keeps the family implicit")]
    TooLarge { size: usize, cap: usize },

    #[error("degree of part is undefined for the empty term")]
    UndefinedDegree,

    #[error("all VC weights are zero; weighted prediction is undefined")]
    DegenerateWeights,

    #[error("forecast {value} for object {object} lies outside [{lo}, {hi}]")]
    OutOfNeighborhood {
        object: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("term `{0}` is not assigned in the model")]
    Unassigned(char),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::Csv(e) if e.is_io_error() => ErrorKind::Io,
            Error::Csv(_)
            | Error::Ragged { .. }
            | Error::MissingValue { .. }
            | Error::NotANumber { .. }
            | Error::Schema(_)
            | Error::Syntax { .. }
            | Error::Usage(_)
            | Error::Lookup { .. } => ErrorKind::Validation,
            _ => ErrorKind::Domain,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
