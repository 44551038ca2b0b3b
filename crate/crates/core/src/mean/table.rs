use std::time::Duration;

use crate::options::SolverOptions;
use crate::series::ValueSet;

/// Counters collected while filling a [`MeanTable`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FillStats {
    pub computed: u64,
    /// Entries excluded by the window and left at `+inf`.
    pub skipped: u64,
    pub bytes: u128,
    pub elapsed: Duration,
}

/// Dense `(k + 2)`-dimensional table `D[p, l, s]`.
///
/// Stored flat with `s` fastest, then the position tuple (last series
/// fastest), then `l`. Unreachable and windowed-out entries hold `+inf`.
#[derive(Debug, Clone)]
pub struct MeanTable {
    pub(crate) lengths: Vec<usize>,
    pub(crate) strides: Vec<usize>,
    pub(crate) positions: usize,
    pub(crate) max_len: usize,
    pub(crate) values: ValueSet,
    pub(crate) data: Vec<f64>,
    pub(crate) stats: FillStats,
    pub(crate) options: SolverOptions,
}

impl MeanTable {
    /// Extents `(n_1, ..., n_k, L_max, r)`.
    pub fn extents(&self) -> Vec<usize> {
        let mut e = self.lengths.clone();
        e.push(self.max_len);
        e.push(self.values.len());
        e
    }

    pub fn values(&self) -> &ValueSet {
        &self.values
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn stats(&self) -> FillStats {
        self.stats
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// Entry at 1-based `positions`, mean position `len` and value index `value`.
    ///
    /// Any position equal to 0 yields the `+inf` sentinel.
    ///
    /// # Panics
    ///
    /// If an index is beyond the table extents.
    pub fn entry(&self, positions: &[usize], len: usize, value: usize) -> f64 {
        assert_eq!(
            positions.len(),
            self.lengths.len(),
            "wrong number of positions"
        );
        if positions.contains(&0) {
            return f64::INFINITY;
        }
        assert!(
            len >= 1 && len <= self.max_len,
            "mean position {len} out of range"
        );
        assert!(
            value >= 1 && value <= self.values.len(),
            "value index {value} out of range"
        );
        let mut pos = 0;
        for ((&p, &n), &stride) in positions.iter().zip(&self.lengths).zip(&self.strides) {
            assert!(p <= n, "position {p} beyond series length {n}");
            pos += (p - 1) * stride;
        }
        self.data[self.index(pos, len - 1, value - 1)]
    }

    /// Raw entries in storage order.
    pub fn raw(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub(crate) fn index(&self, pos: usize, len: usize, value: usize) -> usize {
        (len * self.positions + pos) * self.values.len() + value
    }

    #[inline]
    pub(crate) fn row(&self, pos: usize, len: usize) -> &[f64] {
        let start = self.index(pos, len, 0);
        &self.data[start..start + self.values.len()]
    }

    pub(crate) fn decode(&self, mut pos: usize, out: &mut [usize]) {
        for (i, &stride) in self.strides.iter().enumerate() {
            out[i] = pos / stride;
            pos %= stride;
        }
    }
}
