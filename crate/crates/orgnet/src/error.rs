//! Crate-wide error type.
//!
//! Diagnostic payloads are carried as `f64` regardless of the scalar the
//! caller computes with; errors are for humans and logs, not for further
//! arithmetic.

use thiserror::Error;

/// Everything that can go wrong across the engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Pmf probabilities do not sum to 1 within the construction tolerance.
    #[error("pmf probabilities sum to {mass}, not 1 (tolerance 1e-9)")]
    NonUnitMass { mass: f64 },

    /// A pmf probability is negative.
    #[error("pmf probability {prob} for support entry {entry} is negative")]
    NegativeProb { entry: u32, prob: f64 },

    /// Support entries are not distinct and ascending.
    #[error("pmf support must be distinct and ascending (offending entry {entry})")]
    DuplicateSupport { entry: u32 },

    /// Parallel lists have different lengths.
    #[error("expected lists of equal nonzero length, got {left} and {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A support entry exceeds the exponentiation guard.
    #[error("support entry {entry} exceeds the cap of {cap}")]
    SupportTooLarge { entry: u32, cap: u32 },

    /// A scalar argument fell outside its documented domain.
    #[error("{what} = {value} outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// Generating-function inversion requested for a pmf with mass at 0.
    #[error("generating function is not invertible: pmf places mass on 0")]
    NotInvertible,

    /// Fixed-point iteration hit its cap before meeting the tolerance.
    #[error("fixed-point iteration did not converge within {cap} steps (residual {residual})")]
    NoConvergence { cap: u64, residual: f64 },

    /// Simulation configured with zero trials.
    #[error("simulation requires at least one trial")]
    ZeroTrials,

    /// Culture weights are invalid (non-positive or not summing to 1).
    #[error("invalid culture weights: {0}")]
    Weight(String),

    /// A game or menu specification is internally inconsistent.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A root-finding request that cannot be satisfied.
    #[error("no root: {0}")]
    NoRoot(String),

    /// The leadership chooser was handed an empty option map.
    #[error("empty option menu")]
    EmptyMenu,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
