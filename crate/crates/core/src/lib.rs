//! Desk-scale numerical laboratory for critical-line statistics of the
//! Riemann zeta function.
//!
//! The crate evaluates zeta, |zeta| and log zeta on the critical line with an
//! independent high-precision oracle; builds and audits tables of nontrivial
//! zeros; optimizes the weight constants behind the twisted exponential
//! moments; realizes the smoothed Dirichlet-polynomial approximation to
//! log zeta together with its zero term; partitions [T, 2T] by Dirichlet
//! polynomial increments and zero proximity; models p^{-it} by independent
//! unit-circle variables; and estimates the twisted moments by panelwise
//! quadrature between zeros. The `zml` binary exposes all of it as
//! subcommands emitting CSV plus a JSON run summary.

pub mod constants;
pub mod dd;
pub mod error;
pub mod kernel;
pub mod primes;
pub mod quad;
pub mod rng;
pub mod zeros;
pub mod zeta;

pub use error::{Error, Result};
