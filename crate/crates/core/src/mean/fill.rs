use std::time::Instant;

use crate::distance::cost_c;
use crate::error::{Error, Result};
use crate::options::{FillStrategy, MaxLength, SolverOptions};
use crate::series::{ProblemInstance, ValueSet};

use super::table::{FillStats, MeanTable};

const DEADLINE_CHECK_ROWS: usize = 1024;

/// Estimated bytes of the dense table for `instance` under `options`.
pub fn estimate_table_bytes(instance: &ProblemInstance, options: &SolverOptions) -> Result<u128> {
    let max_len = options.resolve_max_length(instance)? as u128;
    let r = ValueSet::from_instance(instance).len() as u128;
    let positions = instance
        .lengths()
        .iter()
        .fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
    Ok(positions
        .saturating_mul(max_len)
        .saturating_mul(r)
        .saturating_mul(std::mem::size_of::<f64>() as u128))
}

/// Fills the mean table.
///
/// Rows `(p, l)` are produced with `l` ascending and, within a layer, the
/// position tuple in mixed-radix order, so every componentwise-smaller
/// tuple is already final when it is read.
pub fn fill_table(instance: &ProblemInstance, options: &SolverOptions) -> Result<MeanTable> {
    let started = Instant::now();
    let deadline = options.timeout.map(|t| started + t);

    options.check_window(instance)?;
    let max_len = options.resolve_max_length(instance)?;
    let bytes = estimate_table_bytes(instance, options)?;
    if bytes > options.mem_cap_bytes as u128 {
        return Err(Error::MemoryCap {
            required_bytes: bytes,
            cap_bytes: options.mem_cap_bytes as u128,
        });
    }
    if let Some(deadline) = deadline {
        if Instant::now() >= deadline {
            return Err(Error::Timeout {
                elapsed: started.elapsed(),
            });
        }
    }

    let lengths = instance.lengths();
    let k = lengths.len();
    let mut strides = vec![1usize; k];
    for i in (0..k.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * lengths[i + 1];
    }
    let positions: usize = lengths.iter().product();
    let values = ValueSet::from_instance(instance);
    let r = values.len();

    let mut resolved = options.clone();
    resolved.max_mean_length = MaxLength::Fixed(max_len);

    let mut table = MeanTable {
        lengths,
        strides,
        positions,
        max_len,
        values,
        data: vec![f64::INFINITY; positions * max_len * r],
        stats: FillStats {
            bytes,
            ..FillStats::default()
        },
        options: resolved,
    };

    let mut filler = RowFiller::new(instance, &table);
    let mut rows_done = 0usize;
    for len in 0..max_len {
        let mut p = vec![0usize; k];
        for pos in 0..positions {
            if pos > 0 {
                advance(&mut p, &table.lengths);
            }
            if let Some(d) = options.window {
                let hi = *p.iter().max().unwrap();
                let lo = *p.iter().min().unwrap();
                if hi - lo > d {
                    table.stats.skipped += r as u64;
                    continue;
                }
            }
            filler.fill_row(&mut table, &p, pos, len);
            table.stats.computed += r as u64;

            rows_done += 1;
            if rows_done.is_multiple_of(DEADLINE_CHECK_ROWS) {
                if let Some(deadline) = deadline {
                    if Instant::now() >= deadline {
                        return Err(Error::Timeout {
                            elapsed: started.elapsed(),
                        });
                    }
                }
            }
        }
    }
    table.stats.elapsed = started.elapsed();
    Ok(table)
}

/// Odometer increment with the last coordinate fastest.
fn advance(p: &mut [usize], lengths: &[usize]) {
    for i in (0..p.len()).rev() {
        p[i] += 1;
        if p[i] < lengths[i] {
            return;
        }
        p[i] = 0;
    }
}

/// Scratch space and per-instance constants for filling one row `D[p, l, *]`.
struct RowFiller<'a> {
    series: Vec<&'a [f64]>,
    values: Vec<f64>,
    c: f64,
    k: usize,
    strategy: FillStrategy,
    allow_empty: bool,
    /// Sum of strides of the series in each subset.
    mask_offsets: Vec<usize>,
    /// Per series, `|x[q] - v_s|` laid out `[q * r + s]`.
    abs_table: Vec<Vec<f64>>,
    /// Per series, `C(x[q], x[q - 1], v_s)`, unused at `q = 0`.
    merge_table: Vec<Vec<f64>>,
    /// Per series, `max(0, v_s - x[q])`.
    above_table: Vec<Vec<f64>>,
    /// Per series, `max(0, x[q] - v_s)`.
    below_table: Vec<Vec<f64>>,
    point: Vec<f64>,
    out: Vec<f64>,
    move_sum: Vec<f64>,
    total_abs: Vec<f64>,
    above: Vec<f64>,
    below: Vec<f64>,
    left: Vec<f64>,
}

/// Minimum without NaN handling; table entries are never NaN.
#[inline(always)]
fn fmin(a: f64, b: f64) -> f64 {
    if b < a {
        b
    } else {
        a
    }
}

fn point_table(points: &[f64], values: &[f64], f: impl Fn(usize, f64) -> f64) -> Vec<f64> {
    (0..points.len())
        .flat_map(|q| values.iter().map(move |&v| (q, v)))
        .map(|(q, v)| f(q, v))
        .collect()
}

impl<'a> RowFiller<'a> {
    fn new(instance: &'a ProblemInstance, table: &MeanTable) -> Self {
        let k = instance.k();
        let r = table.values.len();
        let c = instance.c();
        let values = table.values.values();
        let series: Vec<&[f64]> = instance.series().iter().map(|s| s.points()).collect();
        let mask_offsets = (0..1usize << k)
            .map(|mask| {
                (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| table.strides[i])
                    .sum()
            })
            .collect();
        let per_series = |f: &dyn Fn(&[f64], usize, f64) -> f64| -> Vec<Vec<f64>> {
            series
                .iter()
                .map(|pts| point_table(pts, values, |q, v| f(pts, q, v)))
                .collect()
        };
        Self {
            abs_table: per_series(&|pts, q, v| (pts[q] - v).abs()),
            merge_table: per_series(&|pts, q, v| {
                if q == 0 {
                    f64::INFINITY
                } else {
                    cost_c(pts[q], pts[q - 1], v, c)
                }
            }),
            above_table: per_series(&|pts, q, v| (v - pts[q]).max(0.0)),
            below_table: per_series(&|pts, q, v| (pts[q] - v).max(0.0)),
            series,
            values: values.to_vec(),
            c,
            k,
            strategy: table.options.strategy,
            allow_empty: table.options.allow_empty_move_set,
            mask_offsets,
            point: vec![0.0; k],
            out: vec![0.0; r],
            move_sum: vec![0.0; r],
            total_abs: vec![0.0; r],
            above: vec![0.0; r],
            below: vec![0.0; r],
            left: vec![0.0; r],
        }
    }

    fn fill_row(&mut self, table: &mut MeanTable, p: &[usize], pos: usize, len: usize) {
        let r = self.values.len();
        let k = self.k;

        self.total_abs.fill(0.0);
        for i in 0..k {
            self.point[i] = self.series[i][p[i]];
            let row = &self.abs_table[i][p[i] * r..(p[i] + 1) * r];
            for (acc, d) in self.total_abs.iter_mut().zip(row) {
                *acc += d;
            }
        }

        if len == 0 && pos == 0 {
            let start = table.index(pos, len, 0);
            table.data[start..start + r].copy_from_slice(&self.total_abs);
            return;
        }

        self.out.fill(f64::INFINITY);
        let full = (1usize << k) - 1;
        let nonzero = (0..k)
            .filter(|&i| p[i] > 0)
            .fold(0usize, |acc, i| acc | 1 << i);

        // Merges: the mean position stays, some series step back. Merging
        // several series at once is never cheaper than merging them one at a
        // time, so the envelope route only tries single series.
        for mask in 1..=full {
            if mask & !nonzero != 0
                || (self.strategy == FillStrategy::Envelope && !mask.is_power_of_two())
            {
                continue;
            }
            let pred = table.row(pos - self.mask_offsets[mask], len);
            for s in 0..r {
                let mut v = pred[s];
                for i in 0..k {
                    if mask >> i & 1 == 1 {
                        v += self.merge_table[i][p[i] * r + s];
                    }
                }
                if v < self.out[s] {
                    self.out[s] = v;
                }
            }
        }

        // Moves and splits: the mean position steps back.
        if len > 0 {
            let first = if self.allow_empty { 0 } else { 1 };
            for move_mask in first..=full {
                if move_mask & !nonzero != 0 {
                    continue;
                }
                let split_mask = full & !move_mask;
                let pred = table.row(pos - self.mask_offsets[move_mask], len - 1);
                match self.strategy {
                    FillStrategy::Direct => self.move_split_direct(pred, p, move_mask, split_mask),
                    FillStrategy::Envelope => self.move_split_envelope(pred, p, split_mask),
                }
            }
        }

        let start = table.index(pos, len, 0);
        table.data[start..start + r].copy_from_slice(&self.out);
    }

    fn move_split_direct(
        &mut self,
        pred: &[f64],
        p: &[usize],
        move_mask: usize,
        split_mask: usize,
    ) {
        let r = self.values.len();
        for s in 0..r {
            let mut m = 0.0;
            for i in 0..self.k {
                if move_mask >> i & 1 == 1 {
                    m += self.abs_table[i][p[i] * r + s];
                }
            }
            self.move_sum[s] = m;
        }
        for s in 0..r {
            let a = self.values[s];
            let mut best = f64::INFINITY;
            for (s_prev, &u) in self.values.iter().enumerate() {
                let mut v = pred[s_prev] + self.move_sum[s];
                for i in 0..self.k {
                    if split_mask >> i & 1 == 1 {
                        v += cost_c(a, self.point[i], u, self.c);
                    }
                }
                best = best.min(v);
            }
            if best < self.out[s] {
                self.out[s] = best;
            }
        }
    }

    /// A series at point `b` that splits from the previous mean value `u` to
    /// the new value `a` pays `c` plus, when `u <= a`, `max(0, a - b) -
    /// max(0, u - b)`, and when `u >= a`, `max(0, b - a) - max(0, b - u)`.
    /// With `A(v)` and `B(v)` the sums of `max(0, v - b)` and `max(0, b - v)`
    /// over the splitting series, the best previous value is found from the
    /// prefix minima of `D[u] - A(u)` and the suffix minima of `D[u] - B(u)`.
    fn move_split_envelope(&mut self, pred: &[f64], p: &[usize], split_mask: usize) {
        let r = self.values.len();
        let m = split_mask.count_ones() as f64;

        self.above.fill(0.0);
        self.below.fill(0.0);
        self.move_sum.fill(0.0);
        for i in 0..self.k {
            let q = p[i] * r;
            if split_mask >> i & 1 == 0 {
                let row = &self.abs_table[i][q..q + r];
                for (acc, d) in self.move_sum.iter_mut().zip(row) {
                    *acc += d;
                }
            } else {
                let above = &self.above_table[i][q..q + r];
                let below = &self.below_table[i][q..q + r];
                for s in 0..r {
                    self.above[s] += above[s];
                    self.below[s] += below[s];
                }
            }
        }

        let mut run = f64::INFINITY;
        for s in 0..r {
            run = fmin(run, pred[s] - self.above[s]);
            self.left[s] = self.above[s] + run;
        }
        let base = m * self.c;
        let mut run = f64::INFINITY;
        for s in (0..r).rev() {
            run = fmin(run, pred[s] - self.below[s]);
            let split = fmin(self.left[s], self.below[s] + run);
            let v = split + base + self.move_sum[s];
            if v < self.out[s] {
                self.out[s] = v;
            }
        }
    }
}
