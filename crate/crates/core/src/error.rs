//! Error taxonomy shared by all laboratory modules.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Inconsistent or ill-formed inputs (grid/potential mismatch, bad parameters).
    #[error("configuration error: {0}")]
    Config(String),

    /// Geometric preconditions violated (delta >= G/2, L not a multiple of G, ...).
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// Node count or dimension above the configured desk-scale caps.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Non-finite samples, out-of-range random parameters.
    #[error("data error: {0}")]
    Data(String),

    /// Eigensolver failures; carries the best residual reached.
    #[error("solver error: {0}")]
    Solver(String),

    /// Spectral subspace empty where an operation requires k >= 1.
    #[error("undefined subspace: {0}")]
    EmptySubspace(String),

    /// Regression requested on too few usable points.
    #[error("fit error: {0}")]
    Fit(String),

    /// Probe grids too coarse for the claimed scales.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Profile shape outside what the classifiers support.
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    /// Quadrature or optimizer breakdown.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Scalar argument outside the formula's domain (eps >= 1, delta_eval >= 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Text formats failed to parse (sequence files, spectral caches).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
