//! Self-check suite: oracle cross-validation, metric axioms, window
//! dominance and the empty-move-set restriction.

use serde::Serialize;

use crate::distance::sum_distance;
use crate::error::Result;
use crate::mean::{compute_mean, fill_table, MeanResult};
use crate::options::SolverOptions;
use crate::oracle::{brute_force_mean, candidate_count, check_metric_axioms, OracleBudget};
use crate::rng::SeededRng;
use crate::series::{build_value_set, validate_cost, ProblemInstance};

const COST_TOLERANCE: f64 = 1e-9;
const COSTS: [f64; 5] = [0.01, 0.1, 0.5, 1.0, 2.0];

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub instances: usize,
    pub budget: OracleBudget,
    /// Forces every generated instance to use this cost.
    pub c: Option<f64>,
    pub metric_samples: usize,
    pub window_instances: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            instances: 60,
            budget: OracleBudget::default(),
            c: None,
            metric_samples: 1000,
            window_instances: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub counterexamples: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    /// Table entries that differ between the restricted and unrestricted
    /// move sets while both are finite. Informational only.
    pub restricted_entry_differences: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Random instance with `k` series of length `1..=max_len` over at most
/// `max_values` distinct grid values.
pub fn random_instance(
    rng: &mut SeededRng,
    k: usize,
    max_len: usize,
    max_values: usize,
    c: f64,
) -> Result<ProblemInstance> {
    const GRID: [f64; 8] = [-1.5, -0.5, 0.0, 0.25, 1.0, 2.0, 3.0, 4.5];
    let count = 1 + rng.below(max_values.min(GRID.len()));
    let grid: Vec<f64> = rng
        .distinct(GRID.len(), count)
        .into_iter()
        .map(|i| GRID[i])
        .collect();
    let series: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let len = 1 + rng.below(max_len);
            (0..len).map(|_| grid[rng.below(grid.len())]).collect()
        })
        .collect();
    ProblemInstance::from_points(series, c)
}

/// Checks every structural guarantee of an unwindowed run.
pub fn structural_violations(instance: &ProblemInstance, result: &MeanResult) -> Vec<String> {
    let mut out = Vec::new();
    let values = build_value_set(instance);
    if let Some(bad) = result.mean.points().iter().find(|&&m| !values.contains(m)) {
        out.push(format!("mean point {bad} is not an input value"));
    }
    if result.mean_length > instance.mean_length_bound() {
        out.push(format!(
            "mean length {} above bound {}",
            result.mean_length,
            instance.mean_length_bound()
        ));
    }
    let evaluated = sum_distance(instance, result.mean.points());
    if (result.cost - evaluated).abs() > COST_TOLERANCE {
        out.push(format!(
            "table cost {} vs pairwise sum {evaluated}",
            result.cost
        ));
    }
    out
}

fn describe(instance: &ProblemInstance) -> String {
    let series: Vec<&[f64]> = instance.series().iter().map(|s| s.points()).collect();
    format!("X = {series:?}, c = {}", instance.c())
}

/// Generates the oracle instance set: `k` cycles through `2..=max_k`
/// (or is 1 when `max_k` is 1).
pub fn oracle_instances(config: &VerifyConfig) -> Result<Vec<ProblemInstance>> {
    if let Some(c) = config.c {
        validate_cost(c)?;
    }
    let mut rng = SeededRng::new(config.seed);
    let budget = &config.budget;
    let k_lo = budget.max_k.clamp(1, 2);
    (0..config.instances)
        .map(|i| {
            let k = k_lo + i % (budget.max_k - k_lo + 1);
            let c = config.c.unwrap_or(COSTS[rng.below(COSTS.len())]);
            random_instance(&mut rng, k, budget.max_len, budget.max_values, c)
        })
        .collect()
}

/// Longest mean length whose enumeration fits the oracle budget, capped by
/// the instance's own length bound.
pub fn oracle_length(instance: &ProblemInstance, budget: &OracleBudget) -> usize {
    let r = build_value_set(instance).len();
    let mut len = instance.mean_length_bound();
    while len > 1 && candidate_count(r, len) > budget.max_candidates {
        len -= 1;
    }
    len
}

pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    let instances = oracle_instances(config)?;
    let mut checks = Vec::new();

    let mut oracle = CheckOutcome::new("oracle equivalence");
    let mut structure = CheckOutcome::new("mean structure (values, length, cost)");
    let mut restriction = CheckOutcome::new("empty move set never improves the optimum");
    let mut entry_diffs = 0;
    for instance in &instances {
        let len = oracle_length(instance, &config.budget);
        let opts = SolverOptions::default().with_max_mean_length(len);
        let dp = compute_mean(instance, &opts)?;
        let (_, brute) = brute_force_mean(instance, len, &config.budget)?;
        if (dp.cost - brute).abs() > COST_TOLERANCE {
            oracle.fail(format!(
                "{}: table {} vs brute force {brute}",
                describe(instance),
                dp.cost
            ));
        }
        for v in structural_violations(instance, &dp) {
            structure.fail(format!("{}: {v}", describe(instance)));
        }

        let loose_opts = opts.clone().with_allow_empty_move_set(true);
        let loose = compute_mean(instance, &loose_opts)?;
        if loose.cost != dp.cost {
            restriction.fail(format!(
                "{}: restricted {} vs unrestricted {}",
                describe(instance),
                dp.cost,
                loose.cost
            ));
        }
        let strict_table = fill_table(instance, &opts)?;
        let loose_table = fill_table(instance, &loose_opts)?;
        entry_diffs += strict_table
            .raw()
            .iter()
            .zip(loose_table.raw())
            .filter(|(a, b)| a.is_finite() && b.is_finite() && a != b)
            .count();
    }
    oracle.detail = format!("{} instances", instances.len());
    structure.detail = oracle.detail.clone();
    restriction.detail = format!(
        "{} instances; {entry_diffs} finite non-optimal entries differ",
        instances.len()
    );
    checks.extend([oracle, structure, restriction]);

    let mut metric = CheckOutcome::new("metric axioms");
    let mut total = 0;
    for (i, c) in [0.01, 0.1, 1.0].into_iter().enumerate() {
        let c = config.c.unwrap_or(c);
        let report = check_metric_axioms(
            config.metric_samples,
            10,
            &[0.0, 1.0, 2.0, 3.0],
            c,
            config.seed.wrapping_add(i as u64),
        )?;
        total += report.samples;
        for v in report.violations {
            metric.fail(format!(
                "{:?} at c = {c}: {} (x={:?}, y={:?}, z={:?})",
                v.axiom, v.detail, v.x, v.y, v.z
            ));
        }
    }
    metric.detail = format!("{total} triples");
    checks.push(metric);

    let mut window = CheckOutcome::new("window dominance");
    let mut rng = SeededRng::new(config.seed ^ 0x5eed);
    let k = config.budget.max_k.max(1);
    for _ in 0..config.window_instances {
        let n = 4;
        let c = config.c.unwrap_or(COSTS[rng.below(COSTS.len())]);
        let grid = [0.0, 0.5, 1.0, 2.0, 3.0, 5.0];
        let series: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| grid[rng.below(grid.len())]).collect())
            .collect();
        let instance = ProblemInstance::from_points(series, c)?;
        let opts = SolverOptions::default().with_max_mean_length(n);
        let exact = compute_mean(&instance, &opts)?;
        let mut previous = f64::INFINITY;
        for d in 1..n {
            let res = compute_mean(&instance, &opts.clone().with_window(d))?;
            if res.cost < exact.cost || res.cost > previous {
                window.fail(format!(
                    "{}: window {d} cost {} (exact {}, previous {previous})",
                    describe(&instance),
                    res.cost,
                    exact.cost
                ));
            }
            if res.evaluated_cost > res.cost + COST_TOLERANCE {
                window.fail(format!(
                    "{}: window {d} evaluated cost above table cost",
                    describe(&instance)
                ));
            }
            previous = res.cost;
        }
        if previous != exact.cost {
            window.fail(format!(
                "{}: full window {previous} vs exact {}",
                describe(&instance),
                exact.cost
            ));
        }
    }
    window.detail = format!("{} instances, k = {k}, n = 4", config.window_instances);
    checks.push(window);

    Ok(VerifyReport {
        seed: config.seed,
        checks,
        restricted_entry_differences: entry_diffs,
    })
}

impl CheckOutcome {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            detail: String::new(),
            counterexamples: Vec::new(),
        }
    }

    fn fail(&mut self, example: String) {
        self.passed = false;
        self.counterexamples.push(example);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_series_budget_trivially_passes() {
        let config = VerifyConfig {
            instances: 10,
            budget: OracleBudget {
                max_k: 1,
                ..OracleBudget::default()
            },
            metric_samples: 50,
            window_instances: 3,
            ..VerifyConfig::default()
        };
        let report = run_verify(&config).unwrap();
        assert!(report.passed(), "{:#?}", report.checks);
    }

    #[test]
    fn negative_cost_is_rejected() {
        let config = VerifyConfig {
            c: Some(-1.0),
            ..VerifyConfig::default()
        };
        assert!(matches!(
            run_verify(&config),
            Err(crate::Error::InvalidCost(_))
        ));
    }

    #[test]
    fn instance_generator_respects_budget() {
        let config = VerifyConfig::default();
        for x in oracle_instances(&config).unwrap() {
            assert!((2..=3).contains(&x.k()));
            assert!(x.max_len() <= 4);
            assert!(build_value_set(&x).len() <= 4);
        }
    }
}
