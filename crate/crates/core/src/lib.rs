//! Exact and analytic evaluation of the error terms in Mertens' first and
//! second theorems,
//!
//! ```text
//! M1(x) = sum_{p <= x} log p / p - log x - E
//! M2(x) = sum_{p <= x} 1 / p - log log x - B
//! ```
//!
//! together with the zeta-zero explicit formulas for them and the limiting
//! distribution of `sqrt(x) * M1(x)`, whose mass on the positive axis gives
//! the (conditional) logarithmic density of `{x : M1(x) > 0}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`prime_engine`] sieves primes in segments and accumulates every prime
//!   and prime-power sum the other modules need.
//! * [`constants`] computes Euler's constant and the Mertens constants `E`
//!   and `B` with certified truncation bounds.
//! * [`mertens_eval`] evaluates `M1`, `M2`, scans grids, certifies
//!   positivity between consecutive primes and measures empirical
//!   logarithmic densities.
//! * [`zeta_zeros`] loads and validates tables of zero ordinates.
//! * [`explicit_formula`] evaluates the truncated zero sums and compares
//!   them against the sieve.
//! * [`bias_distribution`] builds the Bessel-product characteristic function
//!   of the limiting distribution, inverts it, and samples the random model.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x >= a)` also rejects NaN.

pub mod bias_distribution;
pub mod constants;
mod error;
pub mod explicit_formula;
pub mod mertens_eval;
mod phase;
pub mod prime_engine;
pub mod summation;
pub mod zeta_zeros;

pub use error::{Error, Result};
