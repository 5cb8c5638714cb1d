use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index outside window: {0}")]
    OutsideWindow(String),
    #[error("invalid frequency profile: radicand {radicand:e} at xi = {xi}")]
    InvalidProfile { xi: f64, radicand: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("field is not divergence free (max |div| = {0:e})")]
    NotDivergenceFree(f64),
    #[error("non-finite value in integrand at node s = {node}")]
    NonFinite { node: f64 },
    #[error("time {t} outside trajectory range [0, {t_max}]")]
    OutsideTimeRange { t: f64, t_max: f64 },
    #[error("iteration diverged at t = {t} (norm grew by a factor {growth:e})")]
    Diverged { t: f64, growth: f64 },
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error on {path}: {source}")]
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

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
