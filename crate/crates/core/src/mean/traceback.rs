use std::time::{Duration, Instant};

use serde::Serialize;

use crate::distance::{cost_c, sum_distance};
use crate::error::{Error, Result};
use crate::options::SolverOptions;
use crate::series::{ProblemInstance, TimeSeries};

use super::table::MeanTable;

const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct MeanResult {
    pub mean: TimeSeries,
    /// Value of the optimal final table entry.
    pub cost: f64,
    /// `D(X, mean)` recomputed with pairwise distances. Equals `cost` for
    /// exact runs; a windowed table only bounds it from above.
    pub evaluated_cost: f64,
    pub mean_length: usize,
    pub value_count: usize,
    pub table_entries_computed: u64,
    pub table_entries_skipped: u64,
    pub table_bytes: u128,
    #[serde(serialize_with = "serialize_secs")]
    pub wall_time: Duration,
    pub options_used: SolverOptions,
}

fn serialize_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Walks back from the best final entry, re-deriving one achieving
/// predecessor per step.
///
/// Candidates are tried merges first (subsets in ascending bitmask order),
/// then move/split steps (previous value ascending, move subsets ascending);
/// the first one within tolerance wins.
pub fn traceback(table: &MeanTable, instance: &ProblemInstance) -> Result<MeanResult> {
    let started = Instant::now();
    let k = instance.k();
    if table.lengths != instance.lengths() {
        return Err(Error::Inconsistent(
            "table extents do not match the instance".into(),
        ));
    }
    let series: Vec<&[f64]> = instance.series().iter().map(|s| s.points()).collect();
    let values = table.values.values();
    let r = values.len();
    let c = instance.c();
    let full = (1usize << k) - 1;
    let first_move_mask = if table.options.allow_empty_move_set {
        0
    } else {
        1
    };
    let offsets: Vec<usize> = (0..=full)
        .map(|mask| {
            (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| table.strides[i])
                .sum()
        })
        .collect();

    let mut pos = table.positions - 1;
    let (mut len, mut s) = (0, 0);
    let mut best = f64::INFINITY;
    for l in 0..table.max_len {
        for (v, &d) in table.row(pos, l).iter().enumerate() {
            if d < best {
                best = d;
                len = l;
                s = v;
            }
        }
    }
    if !best.is_finite() {
        return Err(Error::Inconsistent("no finite final entry".into()));
    }

    let mut mean = vec![0.0; len + 1];
    mean[len] = values[s];
    let mut p = vec![0usize; k];

    while pos != 0 || len != 0 {
        let current = table.data[table.index(pos, len, s)];
        let tol = TIE_TOLERANCE * current.abs().max(1.0);
        table.decode(pos, &mut p);
        let nonzero = (0..k)
            .filter(|&i| p[i] > 0)
            .fold(0usize, |acc, i| acc | 1 << i);
        let a = values[s];

        let merge = (1..=full).filter(|m| m & !nonzero == 0).find(|&mask| {
            let mut v = table.data[table.index(pos - offsets[mask], len, s)];
            for i in 0..k {
                if mask >> i & 1 == 1 {
                    v += cost_c(series[i][p[i]], series[i][p[i] - 1], a, c);
                }
            }
            (v - current).abs() <= tol
        });
        if let Some(mask) = merge {
            pos -= offsets[mask];
            continue;
        }

        let mut step = None;
        if len > 0 {
            'search: for s_prev in 0..r {
                let u = values[s_prev];
                for mask in first_move_mask..=full {
                    if mask & !nonzero != 0 {
                        continue;
                    }
                    let mut v = table.data[table.index(pos - offsets[mask], len - 1, s_prev)];
                    for i in 0..k {
                        if mask >> i & 1 == 1 {
                            v += (series[i][p[i]] - a).abs();
                        }
                    }
                    for i in 0..k {
                        if mask >> i & 1 == 0 {
                            v += cost_c(a, series[i][p[i]], u, c);
                        }
                    }
                    if (v - current).abs() <= tol {
                        step = Some((mask, s_prev));
                        break 'search;
                    }
                }
            }
        }
        match step {
            Some((mask, s_prev)) => {
                pos -= offsets[mask];
                len -= 1;
                s = s_prev;
                mean[len] = values[s];
            }
            None => {
                return Err(Error::Inconsistent(format!(
                    "no predecessor reproduces entry {current} at positions {:?}, mean position {}, value {}",
                    p.iter().map(|x| x + 1).collect::<Vec<_>>(),
                    len + 1,
                    s + 1
                )))
            }
        }
    }

    let evaluated_cost = sum_distance(instance, &mean);
    let mean_length = mean.len();
    let stats = table.stats;
    Ok(MeanResult {
        mean: TimeSeries::new(mean)?,
        cost: best,
        evaluated_cost,
        mean_length,
        value_count: r,
        table_entries_computed: stats.computed,
        table_entries_skipped: stats.skipped,
        table_bytes: stats.bytes,
        wall_time: stats.elapsed + started.elapsed(),
        options_used: table.options.clone(),
    })
}
