use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid beta {beta}: {reason}")]
    InvalidBeta { beta: f64, reason: &'static str },

    #[error("reality constraint ηω0² ≤ (1−η)ω1² violated (η = {eta}, ω0 = {omega0}, ω1 = {omega1})")]
    RealityConstraint { eta: f64, omega0: f64, omega1: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error at {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }
}
