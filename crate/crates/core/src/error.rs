use thiserror::Error;

/// Errors raised by the spectral routines.
///
/// `index` fields are zero-based; messages count from one.
///
/// [`Error::code`] gives a stable machine-readable name, and
/// [`Error::is_tolerance_failure`] separates numerical-tolerance failures
/// from input validation failures.
#[derive(Debug, Clone, PartialEq, Error, serde::Serialize)]
pub enum Error {
    #[error("moduli are not strictly decreasing at entry {pos}: |z_{pos}| = {left}, |z_{next}| = {right}", pos = index + 1, next = index + 2)]
    InterlacingViolation { index: usize, left: f64, right: f64 },

    #[error("entry {} has zero modulus", index + 1)]
    ZeroEntry { index: usize },

    #[error("log-magnitude {log_magnitude} of weight {} is outside the representable range", index + 1)]
    Overflow { index: usize, log_magnitude: f64 },

    #[error("index {} is out of range 1..={len}", index + 1)]
    IndexOutOfRange { index: usize, len: usize },

    #[error("sigma_{} is zero, no rank-one factor exists", index + 1)]
    ZeroSigma { index: usize },

    #[error("identity {identity} exceeded tolerance: residual {residual:e} > {tolerance:e}")]
    ToleranceExceeded {
        identity: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("symbol is not generic: {reason}")]
    NonGeneric { reason: String },

    #[error("phase fixing failed for vector {}: collinearity defect {defect:e}", index + 1)]
    PhaseInstability { index: usize, defect: f64 },

    #[error("pairing for vector {} vanishes: |pairing| = {magnitude:e}", index + 1)]
    VanishingPairing { index: usize, magnitude: f64 },

    #[error("truncation did not stabilize up to size {max_size}")]
    NoConvergence { max_size: usize },

    #[error("x = {x} is within the pole margin of {pole}")]
    NearPole { x: f64, pole: f64 },

    #[error("linear system is singular at x = {x}")]
    SingularSystem { x: f64 },

    #[error("kernel is trivial, no inner generator exists")]
    TrivialKernelCase,

    #[error("series tail estimate {tail:e} exceeds tolerance {tolerance:e}")]
    TruncationTooShort { tail: f64, tolerance: f64 },

    #[error("denominator has a root of modulus {modulus} inside the closed disc")]
    DenominatorRootInDisc { modulus: f64 },

    #[error("denominator constant term must be 1, got {re}{im:+}i")]
    NormalizationError { re: f64, im: f64 },

    #[error("rank did not stabilize up to size {max_size}")]
    Inconclusive { max_size: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InterlacingViolation { .. } => "InterlacingViolation",
            Error::ZeroEntry { .. } => "ZeroEntry",
            Error::Overflow { .. } => "Overflow",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::ZeroSigma { .. } => "ZeroSigma",
            Error::ToleranceExceeded { .. } => "ToleranceExceeded",
            Error::NonGeneric { .. } => "NonGeneric",
            Error::PhaseInstability { .. } => "PhaseInstability",
            Error::VanishingPairing { .. } => "VanishingPairing",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NearPole { .. } => "NearPole",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::TrivialKernelCase => "TrivialKernelCase",
            Error::TruncationTooShort { .. } => "TruncationTooShort",
            Error::DenominatorRootInDisc { .. } => "DenominatorRootInDisc",
            Error::NormalizationError { .. } => "NormalizationError",
            Error::Inconclusive { .. } => "Inconclusive",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// True for failures of a numerical tolerance, as opposed to rejected input.
    pub fn is_tolerance_failure(&self) -> bool {
        matches!(
            self,
            Error::ToleranceExceeded { .. }
                | Error::PhaseInstability { .. }
                | Error::NoConvergence { .. }
                | Error::TruncationTooShort { .. }
                | Error::Inconclusive { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
