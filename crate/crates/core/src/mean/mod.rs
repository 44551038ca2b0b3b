//! Exact mean computation over the `(k + 2)`-dimensional table, plus the
//! window heuristic.

mod fill;
mod table;
mod traceback;

use std::time::Instant;

pub use fill::{estimate_table_bytes, fill_table};
pub use table::{FillStats, MeanTable};
pub use traceback::{traceback, MeanResult};

use crate::error::{Error, Result};
use crate::options::SolverOptions;
use crate::series::ProblemInstance;

/// Fill followed by traceback. A configured timeout covers both phases.
pub fn compute_mean(instance: &ProblemInstance, options: &SolverOptions) -> Result<MeanResult> {
    let started = Instant::now();
    let table = fill_table(instance, options)?;
    let mut result = traceback(&table, instance)?;
    let elapsed = started.elapsed();
    if let Some(timeout) = options.timeout {
        if elapsed > timeout {
            return Err(Error::Timeout { elapsed });
        }
    }
    result.wall_time = elapsed;
    Ok(result)
}

#[cfg(test)]
mod tests;
