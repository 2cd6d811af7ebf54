use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SteepError {
    /// A parameter violated its admissible range.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The combining weight leaves no power for the secret symbol, or is negative.
    #[error("infeasible combining weight c1^2 = {c1_sq}: admissible interval is (0, {upper})")]
    InfeasibleWeight { c1_sq: f64, upper: f64 },

    /// A closed-form expression left the region where it is defined.
    #[error("numerical domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("payload length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("requested {requested} output bits from {available} input bits")]
    OutputTooLong { requested: usize, available: usize },

    /// Selection was requested with no capacity gap between user and eavesdropper.
    #[error("no capacity gap: C_U = {cap_user} does not exceed C_E = {cap_eve}")]
    NoCapacityGap { cap_user: f64, cap_eve: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for SteepError {
    fn from(e: std::io::Error) -> Self {
        SteepError::Io(e.to_string())
    }
}

impl From<csv::Error> for SteepError {
    fn from(e: csv::Error) -> Self {
        SteepError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for SteepError {
    fn from(e: serde_json::Error) -> Self {
        SteepError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SteepError>;
