use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} {value} out of range [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("cannot parse cell id {input:?}: bad token {token:?} ({reason})")]
    CellParse {
        input: String,
        token: String,
        reason: &'static str,
    },

    #[error("degenerate footprint: {0}")]
    DegenerateFootprint(String),

    #[error("incompatible grids: {0}")]
    IncompatibleGrid(String),

    #[error("invalid timestamp {0:?}")]
    Timestamp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
