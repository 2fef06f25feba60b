//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole at s = 1")]
    Pole,

    #[error("requested accuracy unattainable: need {requested} digits, working precision supports {attainable}")]
    Precision { requested: u32, attainable: u32 },

    #[error("zero table does not cover required range [{need_lo}, {need_hi}] (covered: {covered})")]
    Coverage {
        need_lo: f64,
        need_hi: f64,
        covered: String,
    },

    #[error("t = {t} lies within the exclusion radius {radius} of zero ordinate {gamma}")]
    Proximity { t: f64, gamma: f64, radius: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("ordinates not strictly ascending at line {line}: {prev} then {next}")]
    Monotonicity { line: usize, prev: f64, next: f64 },

    #[error("zero-count audit mismatch on [{lo}, {hi}]: expected {expected}, found {found}")]
    AuditMismatch {
        lo: f64,
        hi: f64,
        expected: usize,
        found: usize,
    },

    #[error("beta = {0} outside (0, 1)")]
    BetaRange(f64),

    #[error("sieve bound {requested:e} exceeds configured limit {limit:e}")]
    Capacity { requested: f64, limit: f64 },

    #[error("index error: {0}")]
    Index(String),

    #[error("expansion would need ~{terms:e} terms (guard: {guard:e})")]
    CombinatorialBlowup { terms: f64, guard: f64 },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("exponent overflow ({arg} exceeds safe exp range); reduce k")]
    Overflow { arg: f64 },

    #[error("invalid cache file: {0}")]
    Cache(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
