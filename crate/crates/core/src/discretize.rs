//! Equal-width bucketing of the value domain.

use serde::Serialize;

use crate::distance::sum_distance;
use crate::error::{Error, Result};
use crate::mean::{compute_mean, MeanResult};
use crate::options::SolverOptions;
use crate::series::{ProblemInstance, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BucketSpec {
    pub v: usize,
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

impl BucketSpec {
    pub fn new(v: usize, lo: f64, hi: f64) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidOption(
                "bucket count must be at least 1".into(),
            ));
        }
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(Error::InvalidOption(format!(
                "invalid bucket domain [{lo}, {hi}]"
            )));
        }
        Ok(Self {
            v,
            lo,
            hi,
            width: (hi - lo) / v as f64,
        })
    }

    /// Domain spanning every point of `instance`.
    pub fn for_instance(instance: &ProblemInstance, v: usize) -> Result<Self> {
        let (lo, hi) = instance
            .series()
            .iter()
            .flat_map(|s| s.points())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        Self::new(v, lo, hi)
    }

    /// 0-based bucket of `x`; the upper end of the domain belongs to the last bucket.
    pub fn bucket(&self, x: f64) -> usize {
        if self.width == 0.0 {
            return 0;
        }
        let j = ((x - self.lo) / self.width).floor();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(self.v - 1)
        }
    }

    pub fn center(&self, bucket: usize) -> f64 {
        self.lo + (bucket as f64 + 0.5) * self.width
    }

    pub fn snap(&self, x: f64) -> f64 {
        if self.width == 0.0 {
            return x;
        }
        self.center(self.bucket(x))
    }
}

/// Replaces every point by the center of its bucket. Lengths, labels and
/// `c` are kept.
pub fn discretize_instance(
    instance: &ProblemInstance,
    v: usize,
) -> Result<(ProblemInstance, BucketSpec)> {
    let spec = BucketSpec::for_instance(instance, v)?;
    let series = instance
        .series()
        .iter()
        .map(|s| {
            let snapped = TimeSeries::new(s.points().iter().map(|&x| spec.snap(x)).collect())?;
            Ok(match s.label() {
                Some(l) => snapped.with_label(l),
                None => snapped,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ProblemInstance::new(series, instance.c())?, spec))
}

/// Outcome of solving on the bucketed instance.
#[derive(Debug, Clone, Serialize)]
pub struct DiscretizedMean {
    /// Result on the bucketed instance; `cost` refers to the bucketed series.
    pub result: MeanResult,
    pub buckets: BucketSpec,
    /// `D(X, mean)` against the original, unsnapped series.
    pub cost_on_original: f64,
}

impl DiscretizedMean {
    /// `(heuristic - exact) / exact`, or 0 when both are 0.
    pub fn relative_error(&self, exact_cost: f64) -> f64 {
        relative_error(self.cost_on_original, exact_cost)
    }
}

pub fn relative_error(heuristic: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if heuristic == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (heuristic - exact) / exact
    }
}

pub fn heuristic_mean_discretized(
    instance: &ProblemInstance,
    v: usize,
    options: &SolverOptions,
) -> Result<DiscretizedMean> {
    let (snapped, buckets) = discretize_instance(instance, v)?;
    let result = compute_mean(&snapped, options)?;
    let cost_on_original = sum_distance(instance, result.mean.points());
    Ok(DiscretizedMean {
        result,
        buckets,
        cost_on_original,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::build_value_set;

    fn instance(series: &[&[f64]], c: f64) -> ProblemInstance {
        ProblemInstance::from_points(series.iter().map(|s| s.to_vec()), c).unwrap()
    }

    #[test]
    fn single_bucket_is_the_midpoint() {
        let x = instance(&[&[0.0, 4.0, 1.0], &[2.0, 10.0]], 0.1);
        let (d, spec) = discretize_instance(&x, 1).unwrap();
        assert_eq!(spec.width, 10.0);
        for s in d.series() {
            assert!(s.points().iter().all(|&p| p == 5.0));
        }
    }

    #[test]
    fn bucket_formula() {
        let spec = BucketSpec::new(5, 0.0, 10.0).unwrap();
        assert_eq!(spec.bucket(3.7), 1);
        assert_eq!(spec.snap(3.7), 3.0);
        assert_eq!(spec.bucket(10.0), 4);
        assert_eq!(spec.bucket(0.0), 0);
        assert_eq!(spec.snap(10.0), 9.0);
    }

    #[test]
    fn two_bucket_example() {
        let x = instance(&[&[0.0, 0.0], &[0.0, 2.0]], 0.5);
        let (d, spec) = discretize_instance(&x, 2).unwrap();
        assert_eq!((spec.lo, spec.hi, spec.width), (0.0, 2.0, 1.0));
        assert_eq!(d.series()[0].points(), &[0.5, 0.5]);
        assert_eq!(d.series()[1].points(), &[0.5, 1.5]);
    }

    #[test]
    fn degenerate_domain_is_identity() {
        let x = instance(&[&[3.0, 3.0], &[3.0]], 0.5);
        let (d, spec) = discretize_instance(&x, 4).unwrap();
        assert_eq!(spec.width, 0.0);
        assert_eq!(d, x);
    }

    #[test]
    fn snapping_identity_reproduces_exact() {
        // Centers sit strictly inside [lo, hi] unless the domain is a single
        // value, so that is the only case where snapping changes nothing.
        let x = instance(&[&[2.5, 2.5], &[2.5], &[2.5, 2.5, 2.5]], 0.1);
        let exact = compute_mean(&x, &SolverOptions::default()).unwrap();
        let heur = heuristic_mean_discretized(&x, 3, &SolverOptions::default()).unwrap();
        assert_eq!(heur.result.mean, exact.mean);
        assert_eq!(heur.result.cost, exact.cost);
        assert_eq!(heur.cost_on_original, exact.evaluated_cost);
    }

    #[test]
    fn two_bucket_heuristic_is_no_better_than_exact() {
        let x = instance(&[&[0.0, 0.0], &[0.0, 2.0]], 0.5);
        let heur = heuristic_mean_discretized(&x, 2, &SolverOptions::default()).unwrap();
        assert!(heur
            .result
            .mean
            .points()
            .iter()
            .all(|&p| p == 0.5 || p == 1.5));
        assert!(heur.cost_on_original >= 2.0 - 1e-12);
        assert!(heur.relative_error(2.0) >= -1e-12);
    }

    #[test]
    fn distinct_value_bound() {
        let x = instance(
            &[&[0.1, 0.7, 2.3, 9.9, 4.4], &[5.5, 6.1, 0.0], &[8.8, 3.2]],
            0.1,
        );
        for v in 1..=12 {
            let (d, spec) = discretize_instance(&x, v).unwrap();
            assert!(build_value_set(&d).len() <= v);
            for (orig, snapped) in x.series().iter().zip(d.series()) {
                for (a, b) in orig.points().iter().zip(snapped.points()) {
                    assert!((a - b).abs() <= spec.width / 2.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_buckets_rejected() {
        let x = instance(&[&[0.0, 1.0]], 0.1);
        assert!(discretize_instance(&x, 0).is_err());
    }
}
