use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Uniform quadrature with too few nodes folds distinct frequencies together.
    #[error("quadrature with {points} points aliases: need more than {required} (max exponent {max_exponent} + N {n})")]
    Aliasing {
        points: u64,
        required: u64,
        max_exponent: u64,
        n: u64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
