use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time series must contain at least one point")]
    EmptySeries,

    #[error("point {index} is not finite ({value})")]
    NonFinitePoint { index: usize, value: f64 },

    #[error("a problem instance needs at least one series")]
    EmptyInstance,

    #[error("split/merge cost must be a finite nonnegative number, got {0}")]
    InvalidCost(f64),

    #[error("window {window} is smaller than the length spread {required} (n_max - n_min)")]
    WindowTooSmall { window: usize, required: usize },

    #[error("invalid option: {0}")]
    InvalidOption(String),

    #[error("table needs {required_bytes} bytes, above the memory cap of {cap_bytes} bytes")]
    MemoryCap {
        required_bytes: u128,
        cap_bytes: u128,
    },

    #[error("run exceeded its time budget after {elapsed:?}")]
    Timeout { elapsed: Duration },

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("brute-force enumeration of {candidates} candidates exceeds the budget of {cap}")]
    OracleBudget { candidates: u128, cap: u128 },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("no series in {0}")]
    NoSeries(PathBuf),

    #[error("not enough eligible series: {0}")]
    NotEnoughSeries(String),
}
