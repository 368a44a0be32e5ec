use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite value {value} encountered in {context}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("mixing angle undefined: coupling and detuning both vanish")]
    UndefinedMixingAngle,

    #[error("derivative undefined at jump (t = 0 with an ideal step detuning)")]
    DerivativeAtJump,

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("Hamiltonian not Hermitian at t = {t} (deviation {deviation:e})")]
    NotHermitian { t: f64, deviation: f64 },

    #[error("state not normalized (|psi|^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("Cayley-Klein pair not normalized (|a|^2 + |b|^2 = {norm_sqr})")]
    CayleyKleinNorm { norm_sqr: f64 },

    #[error("quadrature did not converge on [{a}, {b}]")]
    QuadratureFailed { a: f64, b: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
