//! Brute-force references for validating the table solver on small inputs.
//!
//! Nothing here touches the mean table; the only shared code is the
//! pairwise distance.

use serde::Serialize;

use crate::distance::{msm_distance_slices, sum_distance};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::series::{ProblemInstance, TimeSeries, ValueSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBudget {
    pub max_k: usize,
    pub max_len: usize,
    pub max_values: usize,
    pub max_candidates: u128,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_k: 3,
            max_len: 4,
            max_values: 4,
            max_candidates: 2_000_000,
        }
    }
}

/// `sum_{l=1..=max_len} r^l`, saturating.
pub fn candidate_count(r: usize, max_len: usize) -> u128 {
    let mut total = 0u128;
    let mut power = 1u128;
    for _ in 0..max_len {
        power = power.saturating_mul(r as u128);
        total = total.saturating_add(power);
    }
    total
}

/// Exhaustive search over every sequence of length `1..=max_len` drawn from
/// the instance's point values. Ties keep the shorter sequence, then the
/// lexicographically smaller one by value index.
pub fn brute_force_mean(
    instance: &ProblemInstance,
    max_len: usize,
    budget: &OracleBudget,
) -> Result<(TimeSeries, f64)> {
    if max_len == 0 {
        return Err(Error::InvalidOption("max_len must be at least 1".into()));
    }
    let values = ValueSet::from_instance(instance);
    let r = values.len();
    let candidates = candidate_count(r, max_len);
    if candidates > budget.max_candidates {
        return Err(Error::OracleBudget {
            candidates,
            cap: budget.max_candidates,
        });
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut digits = Vec::with_capacity(max_len);
    let mut seq = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        digits.clear();
        digits.resize(len, 0usize);
        loop {
            seq.clear();
            seq.extend(digits.iter().map(|&d| values.values()[d]));
            let cost = sum_distance(instance, &seq);
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((seq.clone(), cost));
            }
            if !next_sequence(&mut digits, r) {
                break;
            }
        }
    }
    let (seq, cost) = best.expect("at least one candidate");
    Ok((TimeSeries::new(seq)?, cost))
}

/// Advances `digits` to the next sequence in lexicographic order.
fn next_sequence(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Nonnegativity,
    Symmetry,
    Identity,
    Triangle,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub seed: u64,
    pub c: f64,
    pub samples: usize,
    pub checks: usize,
    pub violations: Vec<AxiomViolation>,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const AXIOM_TOLERANCE: f64 = 1e-9;

/// Samples random triples over `value_grid` with lengths `1..=max_len` and
/// checks the metric axioms on each. Identity of indiscernibles is only
/// checked in the "distance zero implies equal" direction when `c > 0`.
pub fn check_metric_axioms(
    sample_count: usize,
    max_len: usize,
    value_grid: &[f64],
    c: f64,
    seed: u64,
) -> Result<MetricReport> {
    if sample_count == 0 || max_len == 0 || value_grid.is_empty() {
        return Err(Error::InvalidOption(
            "metric sampling needs samples, a length and a nonempty grid".into(),
        ));
    }
    crate::series::validate_cost(c)?;
    let mut rng = SeededRng::new(seed);
    let draw = |rng: &mut SeededRng| -> Vec<f64> {
        let len = 1 + rng.below(max_len);
        (0..len)
            .map(|_| value_grid[rng.below(value_grid.len())])
            .collect()
    };

    let mut report = MetricReport {
        seed,
        c,
        samples: sample_count,
        checks: 0,
        violations: Vec::new(),
    };
    for _ in 0..sample_count {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let z = draw(&mut rng);
        let d = |a: &[f64], b: &[f64]| msm_distance_slices(a, b, c);
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        let mut fail = |axiom, detail: String| {
            report.violations.push(AxiomViolation {
                axiom,
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
                detail,
            })
        };

        for (name, v) in [("d(x,y)", xy), ("d(y,z)", yz), ("d(x,z)", xz)] {
            if v < 0.0 || !v.is_finite() {
                fail(Axiom::Nonnegativity, format!("{name} = {v}"));
            }
        }
        if (xy - yx).abs() > AXIOM_TOLERANCE {
            fail(Axiom::Symmetry, format!("d(x,y) = {xy}, d(y,x) = {yx}"));
        }
        let xx = d(&x, &x);
        if xx != 0.0 {
            fail(Axiom::Identity, format!("d(x,x) = {xx}"));
        }
        if c > 0.0 && (xy == 0.0) != (x == y) {
            fail(
                Axiom::Identity,
                format!("d(x,y) = {xy} with x == y: {}", x == y),
            );
        }
        if xz > xy + yz + AXIOM_TOLERANCE {
            fail(Axiom::Triangle, format!("d(x,z) = {xz} > {xy} + {yz}"));
        }
        report.checks += 5;
    }
    Ok(report)
}
