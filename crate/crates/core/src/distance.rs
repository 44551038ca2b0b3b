//! Pairwise Move-Split-Merge distance.

use crate::series::{ProblemInstance, TimeSeries};

/// Split/merge charge for moving `point` next to `neighbor` on its way to `target`.
///
/// Costs exactly `c` when `point` lies between `neighbor` and `target`,
/// otherwise `c` plus the smaller of the two detours.
#[inline]
pub fn cost_c(point: f64, neighbor: f64, target: f64, c: f64) -> f64 {
    if (neighbor <= point && point <= target) || (neighbor >= point && point >= target) {
        c
    } else {
        c + (point - neighbor).abs().min((point - target).abs())
    }
}

/// MSM distance between two nonempty slices.
///
/// Rolls the `(m x n)` table into two rows.
pub fn msm_distance_slices(x: &[f64], y: &[f64], c: f64) -> f64 {
    assert!(
        !x.is_empty() && !y.is_empty(),
        "MSM distance needs nonempty series"
    );
    let n = y.len();
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];

    prev[0] = (x[0] - y[0]).abs();
    for j in 1..n {
        prev[j] = prev[j - 1] + cost_c(y[j], x[0], y[j - 1], c);
    }

    for i in 1..x.len() {
        cur[0] = prev[0] + cost_c(x[i], x[i - 1], y[0], c);
        for j in 1..n {
            let mv = prev[j - 1] + (x[i] - y[j]).abs();
            let merge = prev[j] + cost_c(x[i], x[i - 1], y[j], c);
            let split = cur[j - 1] + cost_c(y[j], x[i], y[j - 1], c);
            cur[j] = mv.min(merge).min(split);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n - 1]
}

pub fn msm_distance(x: &TimeSeries, y: &TimeSeries, c: f64) -> f64 {
    msm_distance_slices(x.points(), y.points(), c)
}

/// `D(X, y)`: sum of MSM distances from every member of the instance to `y`.
pub fn sum_distance(instance: &ProblemInstance, y: &[f64]) -> f64 {
    instance
        .series()
        .iter()
        .map(|x| msm_distance_slices(x.points(), y, instance.c()))
        .sum()
}
