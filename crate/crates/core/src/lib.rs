//! Numerical toolkit for Hausdorff operators on modulation and Wiener
//! amalgam spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: sampled functions, continuous-convention Fourier transforms,
//!   Lebesgue norms and band-limited interpolation.
//! - [`timefreq`]: short-time Fourier transform, the frequency-uniform
//!   partition of unity and the modulation / Wiener amalgam norms.
//! - [`kernel`] and [`quadrature`]: symbolic radial kernels with exact moment
//!   integrals, and the log-spaced Gauss-Legendre rules used to apply them.
//! - [`hausdorff`]: the operator, its companion, and identity checks.
//! - [`witness`]: dyadic-shell extremal functions and blow-up experiments.
//! - [`corpus`] and [`harness`]: seeded test functions, suites and reports.

pub mod corpus;
pub mod error;
pub mod grid;
pub mod harness;
pub mod hausdorff;
pub mod kernel;
pub mod quadrature;
pub mod timefreq;
pub mod witness;

pub use error::{Error, Result};
pub use grid::{Domain, GridFunction, GridSpec};
pub use kernel::{Moment, RadialKernel, Segment};
pub use timefreq::{SpaceKind, SpaceParams};
