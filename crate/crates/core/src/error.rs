use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not traceless (|trace| = {trace_abs:.3e})")]
    NotTraceless { trace_abs: f64 },

    #[error("{what} failed to converge: {detail}")]
    ConvergenceFailure { what: &'static str, detail: String },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    RangeError {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid pure state: {0}")]
    InvalidState(String),

    #[error("states are not orthogonal (|<phi|psi>| = {overlap:.3e})")]
    NotOrthogonal { overlap: f64 },

    #[error("invalid feed-forward protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid product measurement: {0}")]
    InvalidMeasurement(String),

    #[error("POVM is not complete (max deviation from identity {deviation:.3e})")]
    IncompletePovm { deviation: f64 },

    #[error("coincidence counts are empty ({which})")]
    EmptyCounts { which: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
