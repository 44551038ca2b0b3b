use proptest::prelude::*;

use super::*;
use crate::distance::sum_distance;
use crate::options::FillStrategy;
use crate::series::build_value_set;

fn instance(series: &[&[f64]], c: f64) -> ProblemInstance {
    ProblemInstance::from_points(series.iter().map(|s| s.to_vec()), c).unwrap()
}

fn final_min(table: &MeanTable, lengths: &[usize]) -> f64 {
    let mut best = f64::INFINITY;
    for l in 1..=table.max_len() {
        for s in 1..=table.values().len() {
            best = best.min(table.entry(lengths, l, s));
        }
    }
    best
}

#[test]
fn single_point_table() {
    let x = instance(&[&[7.0]], 1.0);
    let table = fill_table(&x, &SolverOptions::default()).unwrap();
    assert_eq!(table.extents(), vec![1, 1, 1]);
    assert_eq!(table.entry(&[1], 1, 1), 0.0);
    assert_eq!(table.entry(&[0], 1, 1), f64::INFINITY);
}

#[test]
fn base_case_sums_moves() {
    let x = instance(&[&[1.0], &[3.0]], 0.1);
    let table = fill_table(&x, &SolverOptions::default()).unwrap();
    assert_eq!(table.entry(&[1, 1], 1, 1), 2.0);
    assert_eq!(table.entry(&[1, 1], 1, 2), 2.0);
}

#[test]
fn two_by_two_instance() {
    // Brute force over {0, 2}-valued means of length <= 3 gives 2.
    let x = instance(&[&[0.0, 0.0], &[0.0, 2.0]], 0.5);
    for strategy in [FillStrategy::Direct, FillStrategy::Envelope] {
        let opts = SolverOptions::default().with_strategy(strategy);
        let table = fill_table(&x, &opts).unwrap();
        assert_eq!(table.max_len(), 3);
        assert!((final_min(&table, &[2, 2]) - 2.0).abs() < 1e-12);

        let res = traceback(&table, &x).unwrap();
        assert!((res.cost - 2.0).abs() < 1e-12);
        assert_eq!(res.mean_length, 2);
        assert!((res.evaluated_cost - res.cost).abs() < 1e-9);
    }
}

#[test]
fn identical_inputs_are_their_own_mean() {
    let s = [0.4, -1.0, 2.0, 2.0];
    for c in [0.0, 0.1, 1.0] {
        let x = instance(&[&s, &s, &s], c);
        let res = compute_mean(&x, &SolverOptions::default()).unwrap();
        assert_eq!(res.cost, 0.0);
        assert_eq!(res.evaluated_cost, 0.0);
        // With free splits and merges a shorter mean ties at zero.
        if c > 0.0 {
            assert_eq!(res.mean.points(), &s);
        }
    }
}

#[test]
fn single_series_is_its_own_mean() {
    let x = instance(&[&[3.0, 1.0, 4.0, 1.0, 5.0]], 0.1);
    let res = compute_mean(&x, &SolverOptions::default()).unwrap();
    assert_eq!(res.cost, 0.0);
    assert_eq!(res.mean.points(), x.series()[0].points());
}

#[test]
fn single_points_tie() {
    let x = instance(&[&[1.0], &[3.0]], 0.1);
    let res = compute_mean(&x, &SolverOptions::default()).unwrap();
    assert_eq!(res.cost, 2.0);
    assert_eq!(res.mean.points(), &[1.0]);
}

#[test]
fn full_window_matches_exact() {
    let x = instance(&[&[0.0, 0.0], &[0.0, 2.0]], 0.5);
    let exact = compute_mean(&x, &SolverOptions::default()).unwrap();
    let windowed = compute_mean(&x, &SolverOptions::default().with_window(1)).unwrap();
    assert_eq!(exact.cost, 2.0);
    assert_eq!(windowed.cost, exact.cost);
    assert_eq!(windowed.table_entries_skipped, 0);
}

#[test]
fn window_skips_far_positions() {
    let x = instance(&[&[0.0, 1.0, 2.0, 3.0], &[1.0, 1.0, 2.0, 2.0]], 0.1);
    let opts = SolverOptions::default()
        .with_window(1)
        .with_max_mean_length(4);
    let table = fill_table(&x, &opts).unwrap();
    let r = table.values().len() as u64;
    // 16 position pairs, 6 with |p1 - p2| > 1, times 4 mean positions.
    assert_eq!(table.stats().skipped, 6 * 4 * r);
    assert_eq!(table.stats().computed, 10 * 4 * r);
    assert_eq!(table.entry(&[4, 1], 2, 1), f64::INFINITY);
}

#[test]
fn configuration_errors() {
    let x = instance(&[&[0.0, 1.0, 2.0, 3.0], &[1.0]], 0.1);
    assert!(matches!(
        compute_mean(&x, &SolverOptions::default().with_window(2)),
        Err(Error::WindowTooSmall {
            window: 2,
            required: 3
        })
    ));
    assert!(compute_mean(&x, &SolverOptions::default().with_window(3)).is_ok());

    assert!(matches!(
        compute_mean(&x, &SolverOptions::default().with_mem_cap_bytes(8)),
        Err(Error::MemoryCap { .. })
    ));
    assert!(matches!(
        compute_mean(
            &x,
            &SolverOptions::default().with_timeout(std::time::Duration::ZERO)
        ),
        Err(Error::Timeout { .. })
    ));
}

#[test]
fn memory_estimate() {
    let x = instance(&[&[0.0, 1.0, 2.0], &[1.0, 5.0]], 0.1);
    // 3 * 2 positions, (3 - 1) * 2 + 1 = 5 mean positions, 4 values.
    assert_eq!(
        estimate_table_bytes(&x, &SolverOptions::default()).unwrap(),
        6 * 5 * 4 * 8
    );
}

#[test]
fn max_length_caps_mean() {
    let x = instance(&[&[0.0, 3.0, 0.0, 3.0], &[3.0, 0.0, 3.0, 0.0]], 0.01);
    let res = compute_mean(&x, &SolverOptions::default().with_max_mean_length(2)).unwrap();
    assert!(res.mean_length <= 2);
    let unbounded = compute_mean(&x, &SolverOptions::default()).unwrap();
    assert!(unbounded.cost <= res.cost);
}

fn small_instance() -> impl Strategy<Value = ProblemInstance> {
    let grid = prop::sample::subsequence(vec![-1.0, 0.0, 0.5, 1.0, 2.0, 3.5], 1..=4);
    (
        grid,
        1usize..=3,
        prop::sample::select(vec![0.0, 0.01, 0.1, 0.5, 1.0, 2.0]),
    )
        .prop_flat_map(|(grid, k, c)| {
            let one = prop::collection::vec(prop::sample::select(grid), 1..=4);
            (prop::collection::vec(one, k), Just(c))
        })
        .prop_map(|(series, c)| ProblemInstance::from_points(series, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn envelope_matches_direct(x in small_instance(), allow_empty in any::<bool>()) {
        let base = SolverOptions::default().with_allow_empty_move_set(allow_empty);
        let direct = fill_table(&x, &base.clone().with_strategy(FillStrategy::Direct)).unwrap();
        let env = fill_table(&x, &base.with_strategy(FillStrategy::Envelope)).unwrap();
        for (a, b) in direct.raw().iter().zip(env.raw()) {
            prop_assert!(a == b || (a - b).abs() <= 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn structural_properties(x in small_instance()) {
        let res = compute_mean(&x, &SolverOptions::default()).unwrap();
        let v = build_value_set(&x);
        prop_assert!(res.mean.points().iter().all(|&m| v.contains(m)));
        prop_assert!(res.mean_length <= x.mean_length_bound());
        prop_assert!((res.cost - sum_distance(&x, res.mean.points())).abs() <= 1e-9);
    }

    #[test]
    fn permutation_invariant(x in small_instance()) {
        let mut rev = x.series().to_vec();
        rev.reverse();
        let y = ProblemInstance::new(rev, x.c()).unwrap();
        let a = compute_mean(&x, &SolverOptions::default()).unwrap();
        let b = compute_mean(&y, &SolverOptions::default()).unwrap();
        prop_assert!((a.cost - b.cost).abs() <= 1e-9);
    }

    #[test]
    fn empty_move_set_does_not_change_optimum(x in small_instance()) {
        let strict = compute_mean(&x, &SolverOptions::default()).unwrap();
        let loose = compute_mean(&x, &SolverOptions::default().with_allow_empty_move_set(true)).unwrap();
        prop_assert!((strict.cost - loose.cost).abs() <= 1e-9);
    }
}
