//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by covariance-matrix and entanglement computations.
///
/// Variant names are part of the CLI contract: the command-line front end
/// prints them verbatim on the error stream.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NonFinite: entry ({row}, {col}) is not a finite number")]
    NonFinite { row: usize, col: usize },

    #[error("DimensionMismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("Unphysical: {context} (nu_min = {nu_min})")]
    Unphysical { context: String, nu_min: f64 },

    #[error("NotPositiveDefinite: smallest eigenvalue {min_eig}")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("DegenerateNumerics: {context}")]
    DegenerateNumerics { context: String },

    #[error("EmptyKeepSet: partial trace needs at least one kept mode")]
    EmptyKeepSet,

    #[error("IndexOutOfRange: mode {index} out of range for {n_modes} modes")]
    IndexOutOfRange { index: usize, n_modes: usize },

    #[error("InvalidBipartition: {context}")]
    InvalidBipartition { context: String },

    #[error("ConstraintViolation: {constraint} violated by {amount}")]
    ConstraintViolation { constraint: String, amount: f64 },

    #[error("NegativeRadicand: {context} (radicand = {radicand})")]
    NegativeRadicand { context: String, radicand: f64 },

    #[error("UnphysicalPurities: (mu1, mu2, mu) = ({mu1}, {mu2}, {mu}) outside the physical region")]
    UnphysicalPurities { mu1: f64, mu2: f64, mu: f64 },

    #[error("NotSymmetric: marginal purities differ by {deviation}")]
    NotSymmetric { deviation: f64 },

    #[error("NotBisymmetric: {context}")]
    NotBisymmetric { context: String },

    #[error("NotPure: symplectic eigenvalue {nu} deviates from 1")]
    NotPure { nu: f64 },

    #[error("OptimizerFailure: {context} (best value {best}, restart spread {spread})")]
    OptimizerFailure { context: String, best: f64, spread: f64 },

    #[error("DomainError: {context}")]
    DomainError { context: String },
}

impl Error {
    /// Stable machine-readable name of the variant, used by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::Unphysical { .. } => "Unphysical",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::DegenerateNumerics { .. } => "DegenerateNumerics",
            Error::EmptyKeepSet => "EmptyKeepSet",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::InvalidBipartition { .. } => "InvalidBipartition",
            Error::ConstraintViolation { .. } => "ConstraintViolation",
            Error::NegativeRadicand { .. } => "NegativeRadicand",
            Error::UnphysicalPurities { .. } => "UnphysicalPurities",
            Error::NotSymmetric { .. } => "NotSymmetric",
            Error::NotBisymmetric { .. } => "NotBisymmetric",
            Error::NotPure { .. } => "NotPure",
            Error::OptimizerFailure { .. } => "OptimizerFailure",
            Error::DomainError { .. } => "DomainError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
