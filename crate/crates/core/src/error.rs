use thiserror::Error;

/// Everything that can go wrong while building operands or evaluating a checker.
///
/// Display strings start with the variant name so command-line diagnostics
/// can be matched without parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotHermitian: asymmetry {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("ConvergenceFailure: {0}")]
    ConvergenceFailure(&'static str),

    #[error("NegativeEigenvalue: eigenvalue {value:.6e} below clamp threshold {threshold:.3e}")]
    NegativeEigenvalue { value: f64, threshold: f64 },

    #[error("BadExponent: {name} = {value} (expected {expected})")]
    BadExponent {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("NonIntegerS: s = {0} must be an integer >= 1")]
    NonIntegerS(f64),

    #[error("DimMismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("LengthMismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("PreconditionViolated: {0}")]
    PreconditionViolated(String),

    #[error("DomainError: {0}")]
    DomainError(String),

    #[error("SingularShift: t + eigenvalue = {0:.6e} is not positive")]
    SingularShift(f64),

    #[error("SingularMatrix: smallest eigenvalue {0:.6e} is not positive")]
    SingularMatrix(f64),

    #[error("TruncationError: estimated tail {tail:.3e} exceeds target {target:.3e}")]
    TruncationError { tail: f64, target: f64 },

    #[error("BadSpec: {0}")]
    BadSpec(String),

    #[error("IncompatibleEnsemble: {0}")]
    IncompatibleEnsemble(String),

    #[error("UnknownInequality: {0}")]
    UnknownInequality(String),

    #[error("CorruptWitness: {0}")]
    CorruptWitness(String),

    #[error("MalformedMatrix: {0}")]
    MalformedMatrix(String),
}

pub type Result<T> = std::result::Result<T, Error>;
