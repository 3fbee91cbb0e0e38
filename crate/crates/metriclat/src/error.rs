//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by validation, numerics and I/O across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("operator is not strictly positive: min eigenvalue {min_eigenvalue:.6e} (threshold {threshold:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("metric is too ill-conditioned: kappa {kappa:.3e} exceeds {kappa_max:.3e}")]
    IllConditionedMetric { kappa: f64, kappa_max: f64 },

    #[error("T is numerically singular or exceeds the condition threshold: kappa {kappa:.3e} > {kappa_max:.3e}")]
    SingularT { kappa: f64, kappa_max: f64 },

    #[error("intertwining residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    IntertwiningFailed { residual: f64, tolerance: f64 },

    #[error("lambda {lambda} lies within {distance:.3e} of the point spectrum (margin {margin:.3e})")]
    LambdaInSpectrum {
        lambda: num_complex::Complex64,
        distance: f64,
        margin: f64,
    },

    #[error("operator is not normal: commutator residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotNormal { residual: f64, tolerance: f64 },

    #[error("operator is not quasi-Hermitian for this metric: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotQuasiHermitian { residual: f64, tolerance: f64 },

    #[error("symmetrized operator is not Hermitian: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotQuasiSelfAdjoint { residual: f64, tolerance: f64 },

    #[error("form is not symmetric: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotSymmetricForm { residual: f64, tolerance: f64 },

    #[error("probe {probe} fails the invertibility certificate: min singular value {min_singular:.3e} <= {threshold:.3e}")]
    ProbeInSpectrum {
        probe: f64,
        min_singular: f64,
        threshold: f64,
    },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("grid too coarse: need at least {needed} points, got {got}")]
    GridTooCoarse { needed: usize, got: usize },

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("symbolic operation unsupported: {0}")]
    SymbolUnsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("LAPACK failure: {0}")]
    Lapack(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
