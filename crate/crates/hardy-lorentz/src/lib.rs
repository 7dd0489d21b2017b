//! Decreasing rearrangements, Lorentz quasi-norms, and sharp-inequality
//! verification for radial profiles on ℝⁿ.
//!
//! The library works with exact piecewise power-affine radial functions
//! (`profile`), computes distribution functions and rearrangements
//! (`rearrange`), Lorentz quasi-norms with singularity-aware quadrature
//! (`lorentz`), the constructive transforms behind the sharp Hardy and
//! Sobolev-Lorentz embedding inequalities (`transforms`), structured
//! inequality reports (`inequalities`), and the extremal families that
//! witness sharpness and attainment (`extremals`). The `cli` module backs
//! the `hardy-lorentz` binary.

pub mod cli;
pub mod corpus;
pub mod extremals;
pub mod inequalities;
pub mod lorentz;
pub mod profile;
pub mod quad;
pub mod rearrange;
pub mod transforms;

pub use lorentz::{LorentzParams, QIndex};
pub use profile::{PowerAffineSegment, RadialFunction, RadialProfile};
pub use quad::{QuadConfig, QuadResult};
pub use rearrange::{DimensionContext, OneDimFunction, SampledFunction};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside an operation's domain (bad parameters, wrong monotonicity, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Derivative requested at a breakpoint, where it may jump.
    #[error("derivative undefined at breakpoint r = {0}")]
    Breakpoint(f64),
    /// A structurally invalid segment list, with the offending segment index.
    #[error("invalid segment {index}: {reason}")]
    InvalidSegment { index: usize, reason: String },
    /// A structurally invalid profile (problems not tied to one segment).
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    /// The requested quantity is infinite; detected by exponent analysis.
    #[error("divergent: {0}")]
    Divergent(String),
    /// An inequality that must hold was violated beyond tolerance.
    #[error("inequality violated: {0}")]
    Violation(String),
    /// Malformed textual input (CSV / JSON), with a 1-based line number.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
