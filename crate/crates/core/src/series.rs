//! Time series, problem instances and the candidate value set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, nonempty sequence of finite real values with an optional class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    points: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    label: Option<String>,
}

impl TimeSeries {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some((index, &value)) = points.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinitePoint { index, value });
        }
        Ok(Self {
            points,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.points
    }
}

pub(crate) fn validate_cost(c: f64) -> Result<()> {
    if c.is_finite() && c >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidCost(c))
    }
}

/// A set of `k >= 1` series together with the split/merge cost `c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    series: Vec<TimeSeries>,
    c: f64,
}

impl ProblemInstance {
    pub fn new(series: Vec<TimeSeries>, c: f64) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::EmptyInstance);
        }
        validate_cost(c)?;
        Ok(Self { series, c })
    }

    /// Convenience constructor from raw point vectors.
    pub fn from_points<I, S>(series: I, c: f64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<Vec<f64>>,
    {
        let series = series
            .into_iter()
            .map(|s| TimeSeries::new(s.into()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(series, c)
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> usize {
        self.series.len()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.series.iter().map(TimeSeries::len).collect()
    }

    pub fn max_len(&self) -> usize {
        self.series.iter().map(TimeSeries::len).max().unwrap_or(0)
    }

    pub fn min_len(&self) -> usize {
        self.series.iter().map(TimeSeries::len).min().unwrap_or(0)
    }

    /// Upper bound on the length of any mean: `(n_max - 1) * k + 1`.
    pub fn mean_length_bound(&self) -> usize {
        (self.max_len() - 1) * self.k() + 1
    }

    pub fn with_cost(&self, c: f64) -> Result<Self> {
        Self::new(self.series.clone(), c)
    }
}

/// Sorted, deduplicated union of all point values of an instance.
///
/// Deduplication uses exact float equality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueSet {
    values: Vec<f64>,
}

impl ValueSet {
    pub fn from_instance(instance: &ProblemInstance) -> Self {
        Self::from_values(
            instance
                .series()
                .iter()
                .flat_map(|s| s.points().iter().copied()),
        )
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let mut values: Vec<f64> = values.into_iter().collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| a == b);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn contains(&self, value: f64) -> bool {
        self.index_of(value).is_some()
    }

    /// 0-based position of `value`, if present.
    pub fn index_of(&self, value: f64) -> Option<usize> {
        self.values
            .binary_search_by(|probe| probe.total_cmp(&value))
            .ok()
            .or_else(|| self.values.iter().position(|&v| v == value))
    }
}

pub fn build_value_set(instance: &ProblemInstance) -> ValueSet {
    ValueSet::from_instance(instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_set_examples() {
        let x = ProblemInstance::from_points([vec![1.0, 2.0], vec![2.0, 3.0]], 0.1).unwrap();
        assert_eq!(build_value_set(&x).values(), &[1.0, 2.0, 3.0]);

        let x = ProblemInstance::from_points([vec![5.0]], 0.1).unwrap();
        assert_eq!(build_value_set(&x).values(), &[5.0]);

        let x =
            ProblemInstance::from_points([vec![4.0, 5.0, 5.0, 10.0], vec![10.0, 7.0, 8.0]], 0.1)
                .unwrap();
        assert_eq!(build_value_set(&x).values(), &[4.0, 5.0, 7.0, 8.0, 10.0]);
    }

    #[test]
    fn value_set_is_idempotent() {
        let x = ProblemInstance::from_points([vec![3.0, -1.0, 3.0], vec![0.5]], 1.0).unwrap();
        let v = build_value_set(&x);
        let again = ProblemInstance::from_points([v.values().to_vec()], 1.0).unwrap();
        assert_eq!(build_value_set(&again), v);
    }

    #[test]
    fn signed_zero_dedups() {
        let v = ValueSet::from_values([0.0, -0.0, 1.0]);
        assert_eq!(v.len(), 2);
        assert!(v.contains(0.0));
        assert!(v.contains(-0.0));
    }

    #[test]
    fn rejects_invalid_series() {
        assert!(matches!(TimeSeries::new(vec![]), Err(Error::EmptySeries)));
        assert!(matches!(
            TimeSeries::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinitePoint { index: 1, .. })
        ));
        assert!(TimeSeries::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_invalid_instances() {
        assert!(matches!(
            ProblemInstance::new(vec![], 0.1),
            Err(Error::EmptyInstance)
        ));
        assert!(matches!(
            ProblemInstance::from_points([vec![1.0]], -0.5),
            Err(Error::InvalidCost(_))
        ));
        assert!(ProblemInstance::from_points([vec![1.0]], f64::NAN).is_err());
    }

    #[test]
    fn length_bound() {
        let x = ProblemInstance::from_points([vec![0.0; 4], vec![0.0; 2], vec![1.0]], 0.1).unwrap();
        assert_eq!(x.mean_length_bound(), 10);
    }
}
