//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by estimation routines and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// Input slice was empty where at least one observation is required.
    #[error("input is empty")]
    EmptyInput,

    /// A value was NaN or infinite where a finite number is required.
    #[error("non-finite value at index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    /// A weight was zero or negative.
    #[error("non-positive weight at index {index}: {value}")]
    NonPositiveWeight { index: usize, value: f64 },

    /// All observations collapsed to a single support point.
    #[error("degenerate sample: all {n} observations equal {value}")]
    DegenerateSample { n: usize, value: f64 },

    /// Paired slices had incompatible lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Newton iterations ran out before the gradient tolerance was met.
    #[error("solver did not converge in {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NoConvergence { iterations: usize, grad_norm: f64 },

    /// Requested derivative order of J is not implemented.
    #[error("unsupported derivative order ({da}, {db}); orders up to two are available")]
    UnsupportedOrder { da: u8, db: u8 },

    /// A probability or similar bounded argument fell outside its domain.
    #[error("argument {name} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A distribution or option parameter was invalid.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// A fit was paired with a sample it was not estimated from.
    #[error("mismatched inputs: {reason}")]
    MismatchedInputs { reason: String },

    /// Bootstrap resampling kept producing degenerate draws.
    #[error("bootstrap stalled: {attempts} consecutive degenerate resamples")]
    ResampleStalled { attempts: usize },

    /// Too many Monte Carlo replications failed to fit.
    #[error("{failures} replications failed, more than the {max_allowed} allowed")]
    ExcessiveFailures { failures: usize, max_allowed: usize },

    /// Log transform requested on data with non-positive values.
    #[error("log transform requires positive values, found {value} at index {index}")]
    NonPositiveForLog { index: usize, value: f64 },

    /// CSV input could not be read or parsed.
    #[error("csv: {0}")]
    Csv(String),

    /// File I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed command-line usage not caught by the argument parser.
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for input or usage problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. }
            | Error::ResampleStalled { .. }
            | Error::ExcessiveFailures { .. } => 3,
            _ => 2,
        }
    }

    /// Stable machine-readable tag used in the CLI error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyInput => "empty_input",
            Error::NonFinite { .. } => "non_finite",
            Error::NonPositiveWeight { .. } => "non_positive_weight",
            Error::DegenerateSample { .. } => "degenerate_sample",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NoConvergence { .. } => "no_convergence",
            Error::UnsupportedOrder { .. } => "unsupported_order",
            Error::OutOfRange { .. } => "out_of_range",
            Error::InvalidParam { .. } => "invalid_param",
            Error::MismatchedInputs { .. } => "mismatched_inputs",
            Error::ResampleStalled { .. } => "resample_stalled",
            Error::ExcessiveFailures { .. } => "excessive_failures",
            Error::NonPositiveForLog { .. } => "non_positive_for_log",
            Error::Csv(_) => "csv",
            Error::Io(_) => "io",
            Error::Usage(_) => "usage",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
