use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range [{lo}, {hi}]: need 2 <= lo < hi")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("{value} exceeds the configured sieve limit {limit}")]
    LimitExceeded { value: u64, limit: u64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: line {line}: ordinate {value} is not above the previous one {previous}")]
    Ordering {
        path: PathBuf,
        line: usize,
        value: f64,
        previous: f64,
    },

    #[error("{0}: no ordinates found")]
    EmptyTable(PathBuf),

    #[error("zero table failed validation: {0}")]
    Validation(String),

    #[error("truncation height {requested} exceeds table height {available}")]
    HeightExceeded { requested: f64, available: f64 },

    #[error("quadrature did not converge: |R(t)| = {magnitude:e} at t_max = {t_max}")]
    NotConverged { t_max: f64, magnitude: f64 },

    #[error("bad sieve cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
