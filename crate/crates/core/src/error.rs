use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular tensor (det = {det:e})")]
    SingularTensor { det: f64 },

    #[error("non-physical state: {what} = {value:e}")]
    NonPhysicalState { what: &'static str, value: f64 },

    #[error("energy exponent {exponent:e} exceeds overflow guard")]
    Overflow { exponent: f64 },

    #[error("singular Jacobian in linear solve (pivot {pivot})")]
    SingularMatrix { pivot: usize },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("plastic gate oscillates within one step")]
    GateOscillation,

    #[error("time step underflow at t = {time} h in segment {segment} (last residual {residual:e}): {cause}")]
    TimeStepUnderflow {
        time: f64,
        segment: usize,
        residual: f64,
        cause: String,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("no overlapping domain between simulation and experiment")]
    EmptyOverlap,

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures the driver recovers from by cutting the time step.
    pub fn is_recoverable(&self) -> bool {
        matches!(
            self,
            Error::NonPhysicalState { .. }
                | Error::Overflow { .. }
                | Error::NoConvergence { .. }
                | Error::SingularMatrix { .. }
                | Error::SingularTensor { .. }
                | Error::GateOscillation
        )
    }

    pub fn invalid_param(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
