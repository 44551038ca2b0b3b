use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::ProblemInstance;

pub const DEFAULT_MEM_CAP_BYTES: u64 = 8 << 30;

/// Cap on the length of the computed mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxLength {
    /// Resolves to `(n_max - 1) * k + 1`, the largest length any mean can have.
    Unbounded,
    Fixed(usize),
}

/// How `A_MS` minimizes over the previous mean value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillStrategy {
    /// Decomposes the split costs into lower envelopes over the sorted value
    /// set, making each row linear in `r` instead of quadratic.
    #[default]
    Envelope,
    /// Explicit loop over every previous value. Reference route.
    Direct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverOptions {
    pub max_mean_length: MaxLength,
    /// Maximum spread `max_i p_i - min_j p_j` of the position tuple.
    pub window: Option<usize>,
    /// Admit steps in which every series splits.
    pub allow_empty_move_set: bool,
    pub strategy: FillStrategy,
    pub mem_cap_bytes: u64,
    #[serde(skip)]
    pub timeout: Option<Duration>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_mean_length: MaxLength::Unbounded,
            window: None,
            allow_empty_move_set: false,
            strategy: FillStrategy::default(),
            mem_cap_bytes: DEFAULT_MEM_CAP_BYTES,
            timeout: None,
        }
    }
}

impl SolverOptions {
    pub fn with_max_mean_length(mut self, len: usize) -> Self {
        self.max_mean_length = MaxLength::Fixed(len);
        self
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window);
        self
    }

    pub fn with_allow_empty_move_set(mut self, allow: bool) -> Self {
        self.allow_empty_move_set = allow;
        self
    }

    pub fn with_strategy(mut self, strategy: FillStrategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_mem_cap_bytes(mut self, cap: u64) -> Self {
        self.mem_cap_bytes = cap;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }

    /// Length cap actually used for `instance`. Caps above the
    /// bound `(n_max - 1) * k + 1` are clamped to it.
    pub fn resolve_max_length(&self, instance: &ProblemInstance) -> Result<usize> {
        let bound = instance.mean_length_bound();
        match self.max_mean_length {
            MaxLength::Unbounded => Ok(bound),
            MaxLength::Fixed(0) => Err(Error::InvalidOption(
                "max mean length must be at least 1".into(),
            )),
            MaxLength::Fixed(len) => Ok(len.min(bound)),
        }
    }

    pub fn check_window(&self, instance: &ProblemInstance) -> Result<()> {
        if let Some(window) = self.window {
            if window == 0 {
                return Err(Error::InvalidOption("window must be at least 1".into()));
            }
            let required = instance.max_len() - instance.min_len();
            if window < required {
                return Err(Error::WindowTooSmall { window, required });
            }
        }
        Ok(())
    }
}
