//! Error type shared across the engine.

use chrono::NaiveDate;
use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed row: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{path}:{line}: non-positive price {value}")]
    NonPositivePrice {
        path: PathBuf,
        line: usize,
        value: f64,
    },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("{0}: no data rows")]
    EmptyFile(PathBuf),

    #[error("no overlapping dates between {a} and {b}")]
    NoOverlap { a: String, b: String },

    #[error("degenerate series: sample variance too small for a meaningful fit")]
    DegenerateSeries,

    #[error("no interior likelihood maximum for mu in [{lo}, {hi}]")]
    NoConvergence { lo: f64, hi: f64 },

    #[error("ticker mismatch: pair is ({pair_a}, {pair_b}) but data is ({data_a}, {data_b})")]
    TickerMismatch {
        pair_a: String,
        pair_b: String,
        data_a: String,
        data_b: String,
    },

    #[error("all {0} hedge candidates failed to fit")]
    AllFitsFailed(usize),

    #[error("window of {window} days needs more than {len} observations")]
    WindowTooLong { window: usize, len: usize },

    #[error("non-positive cost {0}")]
    NonPositiveCost(f64),

    #[error("signal dates are not a contiguous run of the price dates")]
    DateMisalignment,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no cell has a defined Sharpe ratio")]
    NoDefinedSharpe,

    #[error("invalid thresholds: s_open {s_open} must exceed s_close {s_close} and both must be non-negative")]
    InvalidThresholds { s_open: f64, s_close: f64 },

    #[error("empty ledger")]
    EmptyLedger,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
