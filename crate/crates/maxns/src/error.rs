use thiserror::Error;

/// Errors raised across the crate.
///
/// `Validation` carries the offending field so front ends can report a path
/// such as `params.kappa`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("mode {n}: {reason}")]
    Numerical { n: u64, reason: String },

    #[error("mode {n}: degenerate normalizer |1 + kappa*lambda| = {value:e}")]
    DegenerateNormalizer { n: u64, value: f64 },

    #[error("mode {n}: simplicity assumption violated, |psi| = {value:e}")]
    NotSimple { n: u64, value: f64 },

    #[error("mode {n}: near-singular frame, condition number {cond:e}")]
    NearSingularFrame { n: u64, cond: f64 },

    #[error("mode {n}: numerically singular Gramian (min eigenvalue {min_eig:e}, norm {norm:e})")]
    SingularGramian { n: u64, min_eig: f64, norm: f64 },

    #[error("resolution: {0}")]
    Resolution(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }

    /// Prefix the field path of a validation error, e.g. `kappa` -> `params.kappa`.
    pub fn in_section(self, section: &str) -> Self {
        match self {
            Error::Validation { field, reason } => Error::Validation {
                field: format!("{section}.{field}"),
                reason,
            },
            other => other,
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Geometry(_) | Error::Config(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
