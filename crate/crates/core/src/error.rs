use thiserror::Error;

#[derive(Debug, Error)]
pub enum VqaaError {
    /// Inconsistent sizes, out-of-range indices or unsupported settings.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed or wrongly sized input data.
    #[error("input error: {0}")]
    Input(String),

    #[error("hyperspherical angles are undefined at the origin")]
    UndefinedAngle,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, VqaaError>;

pub(crate) fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(VqaaError::Config(msg.into()))
}

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(VqaaError::Input(msg.into()))
}
