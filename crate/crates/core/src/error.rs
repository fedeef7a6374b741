use crate::grid::Domain;

/// Errors raised by the numerical toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("expected {expected} samples, got {got}")]
    SampleCount { expected: usize, got: usize },

    #[error("expected a {expected:?}-side function, got {got:?}-side")]
    DomainMismatch { expected: Domain, got: Domain },

    #[error("functions live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window function is identically zero")]
    ZeroWindow,

    #[error("lattice point {k:?} lies outside the truncation radius {k_max}")]
    LatticeOutOfRange { k: Vec<i64>, k_max: i64 },

    #[error(
        "spectral mass outside the truncation window is {fraction:.3e} of the total (limit {limit:.1e})"
    )]
    SpectralTail { fraction: f64, limit: f64 },

    #[error("invalid kernel: {0}")]
    Kernel(String),

    #[error("kernel is not admissible: local moment {local}, global moment {global}")]
    Inadmissible { local: String, global: String },

    #[error("quadrature range [{r_min}, {r_max}] does not cover kernel segment [{r_lo}, {r_hi}]")]
    QuadratureCoverage {
        r_min: f64,
        r_max: f64,
        r_lo: f64,
        r_hi: f64,
    },

    #[error("witness construction failed: {0}")]
    Witness(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
