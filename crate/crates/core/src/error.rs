//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or configuration detected before any computation ran.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{op}: argument must be positive")]
    NonPositive { op: &'static str },

    #[error("zeta argument outside convergence region: Re(s) = {re} <= 1 + margin {margin}")]
    OutsideConvergenceRegion { re: f64, margin: f64 },

    #[error("tolerance unreachable: would need about {needed:.3e} terms, cap is {cap}")]
    ToleranceUnreachable { needed: f64, cap: u64 },

    #[error("invalid polynomial: {0}")]
    InvalidPoly(String),

    #[error("invalid rational map: {0}")]
    InvalidMap(String),

    #[error("numerator and denominator share a root near {re:.6e}{im:+.6e}i (separation {distance:.3e})")]
    CommonRoot { re: f64, im: f64, distance: f64 },

    #[error("indeterminate evaluation at {at}: numerator and denominator both vanish")]
    IndeterminateEvaluation { at: String },

    #[error("degenerate composition: degree fell below the expected {expected} (leading coefficients under epsilon)")]
    DegenerateComposition { expected: usize },

    #[error("total degeneration: fixed-point polynomial vanishes identically (the composition acts as the identity)")]
    TotalDegeneration,

    #[error(
        "root finding did not converge: relative residual {residual:.3e} exceeds ceiling {ceiling:.3e} after {iterations} iterations"
    )]
    NoConvergence {
        residual: f64,
        ceiling: f64,
        iterations: usize,
    },

    #[error("enumeration cap exceeded: {alphabet}^{length} = {total} words, cap is {cap}")]
    EnumerationCapExceeded {
        alphabet: usize,
        length: usize,
        total: u128,
        cap: usize,
    },

    #[error("composition degree cap exceeded: degree {degree} over cap {cap}")]
    DegreeCapExceeded { degree: u128, cap: usize },

    #[error(
        "period detection ambiguous at candidate period {divisor}: closure residual {residual:.3e} is within a factor 10 of tolerance {tolerance:.3e}"
    )]
    PeriodDetectionAmbiguous {
        divisor: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("potential undefined at orbit index {index}: {reason}")]
    PotentialUndefined { index: usize, reason: String },

    #[error("orbit closure mismatch: {0}")]
    OrbitClosureMismatch(String),

    #[error("multiplier undefined: {0}")]
    MultiplierUndefined(String),

    #[error("missing divisor data: E({0}) is not available in the table")]
    MissingDivisorData(usize),

    #[error("lambda = {lambda} violates the growth hypothesis (requires lambda > 1)")]
    LambdaNotAboveOne { lambda: f64 },

    #[error("tail not certifiable: certified bound {bound:.3e} exceeds tolerance {tol:.3e} at truncation {n}")]
    TailNotCertifiable { bound: f64, tol: f64, n: usize },

    #[error("evaluation point outside the series radius: |z| * lambda = {product:.6} >= 0.99")]
    OutsideRadius { product: f64 },

    #[error("growth hypothesis implausible: {0}")]
    HypothesisImplausible(String),

    #[error("numerical overflow in {0}")]
    Overflow(&'static str),

    #[error("window too short: {len} points after burn-in, need at least {min}")]
    WindowTooShort { len: usize, min: usize },

    #[error("nonpositive comparator at position {index}: value {value}")]
    NonpositiveComparator { index: usize, value: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
