use thiserror::Error;

use crate::model::Basis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown state label `{label}` in the {basis:?} basis")]
    UnknownLabel { label: String, basis: Basis },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix trace is not 1 (deviation {deviation:.3e})")]
    TraceNotOne { deviation: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPositive { eigenvalue: f64 },

    #[error("state is not exchange symmetric (reduced states differ by {deviation:.3e})")]
    AsymmetricState { deviation: f64 },

    #[error("blockade ratio is undefined at omega = 0 (P_ee and P_e^2 both vanish)")]
    UndefinedRatio,

    #[error("no steady-state scattering at omega = 0")]
    NoScattering,

    #[error(
        "steady state is not unique: two smallest singular values {smallest:.3e}, {next:.3e}"
    )]
    DegenerateSteadyState { smallest: f64, next: f64 },

    #[error("integration failed at t = {t_reached:.6e}: step size underflow ({step:.3e})")]
    StepUnderflow { t_reached: f64, step: f64 },

    #[error("integration exceeded {max_steps} steps at t = {t_reached:.6e}")]
    TooManySteps { t_reached: f64, max_steps: usize },

    #[error(
        "first detector never clicks (collapse weight {weight:.3e}); \
         increase omega or move phi1 away from an odd multiple of pi"
    )]
    UndetectableFirstPhoton { weight: f64 },

    #[error("concurrence eigenvalue has negative real part {value:.3e}")]
    ConcurrenceEigenvalue { value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("linear algebra backend failed: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
}

impl Error {
    /// Process exit code used by the command-line front end:
    /// 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::UnknownLabel { .. }
            | Error::InvalidConfig(_)
            | Error::UndefinedRatio
            | Error::NoScattering
            | Error::Io { .. } => 2,
            _ => 3,
        }
    }
}
