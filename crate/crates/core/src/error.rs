use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are split into input validation problems and numerical
/// diagnostics; [`Error::is_validation`] drives the CLI exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent alpha = {0} is outside the open interval (-1/2, 1/2)")]
    AlphaOutOfRange(f64),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("smooth factor c is not strictly positive: c(theta = {theta:.6}) = {value:.3e}")]
    NonPositiveSymbol { theta: f64, value: f64 },

    #[error("spectral factorization did not converge: grid {grid}, aliasing tail {tail:.3e}")]
    FactorizationFailed { grid: usize, tail: f64 },

    #[error("index {index} out of range (available: {available})")]
    OutOfRange { index: usize, available: usize },

    #[error("Levinson breakdown at step {step}: |gamma| = {modulus}")]
    LevinsonBreakdown { step: usize, modulus: f64 },

    #[error("dense oracle refused: {0}")]
    DenseOracle(String),

    #[error("norm h_{m} inconsistent: column gives {from_column:.17e}, quadrature gives {from_quadrature:.17e}")]
    NormInconsistency { m: usize, from_column: f64, from_quadrature: f64 },

    #[error("asymptotic constant mismatch between integral ({integral:.17e}) and Gamma form ({closed_form:.17e})")]
    ClosedFormMismatch { integral: f64, closed_form: f64 },

    #[error("kernel argument must be nonzero (u = {u}, v = {v})")]
    KernelAtOrigin { u: f64, v: f64 },

    #[error("grid too coarse for rank-{rank} kernel: Gram deviation {deviation:.3e}; increase grid size")]
    RankDeficient { rank: usize, deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::AlphaOutOfRange(_)
                | Error::InvalidWeight(_)
                | Error::NonPositiveSymbol { .. }
                | Error::OutOfRange { .. }
                | Error::KernelAtOrigin { .. }
                | Error::InvalidArgument(_)
                | Error::Json { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
