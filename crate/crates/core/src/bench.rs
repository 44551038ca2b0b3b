//! Benchmark sweeps over sampled UCR instances.
//!
//! Every run becomes one [`RunRecord`]; records are self-describing and
//! carry the equivalent `msm-mean mean` invocation.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::discretize::{heuristic_mean_discretized, relative_error};
use crate::error::{Error, Result};
use crate::ingest::{parse_ucr, sample_instance, ClassMode, Dataset, SamplePlan};
use crate::mean::{compute_mean, estimate_table_bytes};
use crate::options::{MaxLength, SolverOptions};
use crate::series::{build_value_set, ProblemInstance};

pub const CSV_SCHEMA: &str = "# msm-mean bench schema v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Window(usize),
    Buckets(usize),
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Self::Exact => "exact",
            Self::Window(_) => "window",
            Self::Buckets(_) => "buckets",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub datasets: Vec<PathBuf>,
    pub ks: Vec<usize>,
    pub ns: Vec<usize>,
    pub seed: u64,
    /// Overrides the built-in per-dataset cost.
    pub c: Option<f64>,
    pub exact: bool,
    pub windows: Vec<usize>,
    pub buckets: Vec<usize>,
    /// `None` caps the mean at the sample length `n`.
    pub max_length: Option<MaxLength>,
    pub allow_empty_move_set: bool,
    pub timeout: Duration,
    pub mem_cap_bytes: u64,
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            ks: vec![3],
            ns: vec![10],
            seed: 0,
            c: None,
            exact: true,
            windows: Vec::new(),
            buckets: Vec::new(),
            max_length: None,
            allow_empty_move_set: false,
            timeout: Duration::from_secs(600),
            mem_cap_bytes: crate::options::DEFAULT_MEM_CAP_BYTES,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub dataset: String,
    pub dataset_path: String,
    pub class: String,
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub c: f64,
    pub method: String,
    pub window: Option<usize>,
    pub buckets: Option<usize>,
    pub max_length: usize,
    pub allow_empty_move_set: bool,
    /// Series lengths joined with `;`.
    pub lengths: String,
    pub value_count: usize,
    /// `ok`, `timeout`, `memory_cap` or `error`.
    pub status: String,
    /// Optimum of the solved table (bucketed series for `buckets`).
    pub table_cost: Option<f64>,
    /// Sum of distances from the original series to the returned mean.
    pub cost: Option<f64>,
    /// `(cost - exact cost) / exact cost` against the exact run of the same instance.
    pub relative_error: Option<f64>,
    pub mean_length: Option<usize>,
    pub wall_ms: f64,
    pub entries_computed: Option<u64>,
    pub entries_skipped: Option<u64>,
    pub est_bytes: u128,
    pub note: String,
    pub command: String,
}

struct Task {
    dataset: usize,
    k: usize,
    n: usize,
    class: String,
}

/// Per-`(k, n, method)` runtime summary over `ok` rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub k: usize,
    pub n: usize,
    pub method: String,
    pub runs: usize,
    pub ok: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
}

fn resolve_cost(dataset: &Dataset, config: &BenchConfig) -> Result<f64> {
    config.c.or(dataset.default_c).ok_or_else(|| {
        Error::InvalidOption(format!(
            "no built-in split/merge cost for {}; pass one explicitly",
            dataset.name
        ))
    })
}

fn format_command(record: &RunRecord, mem_cap_bytes: u64, timeout: Duration) -> String {
    let mut cmd = format!(
        "msm-mean mean --ucr {} --k {} --n {} --seed {} --class-mode class:{} --c {} --max-length {}",
        record.dataset_path, record.k, record.n, record.seed, record.class, record.c, record.max_length
    );
    if let Some(d) = record.window {
        cmd.push_str(&format!(" --window {d}"));
    }
    if let Some(v) = record.buckets {
        cmd.push_str(&format!(" --buckets {v}"));
    }
    if record.allow_empty_move_set {
        cmd.push_str(" --allow-empty-move-set");
    }
    cmd.push_str(&format!(
        " --mem-cap-gib {} --timeout-s {}",
        mem_cap_bytes as f64 / (1u64 << 30) as f64,
        timeout.as_secs_f64()
    ));
    cmd
}

/// Runs one instance through every configured method. The exact run, if
/// any, goes first so heuristic rows can report their relative error.
fn run_instance(
    dataset: &Dataset,
    task: &Task,
    config: &BenchConfig,
    first_run_id: usize,
) -> Vec<RunRecord> {
    let mut methods = Vec::new();
    if config.exact {
        methods.push(Method::Exact);
    }
    methods.extend(config.windows.iter().map(|&d| Method::Window(d)));
    methods.extend(config.buckets.iter().map(|&v| Method::Buckets(v)));

    let plan = SamplePlan {
        k: task.k,
        n: task.n,
        seed: config.seed,
        class_mode: ClassMode::Class(task.class.clone()),
    };
    let dataset_path = dataset
        .path
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| dataset.name.clone());

    let c = resolve_cost(dataset, config);
    let instance = c
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|&c| sample_instance(dataset, &plan, c).map_err(|e| e.to_string()));

    let max_length = config.max_length.unwrap_or(MaxLength::Fixed(task.n));
    let mut exact_cost = None;
    let mut records = Vec::new();
    for (offset, &method) in methods.iter().enumerate() {
        let mut record = RunRecord {
            run_id: first_run_id + offset,
            dataset: dataset.name.clone(),
            dataset_path: dataset_path.clone(),
            class: task.class.clone(),
            k: task.k,
            n: task.n,
            seed: config.seed,
            c: *c.as_ref().unwrap_or(&f64::NAN),
            method: method.name().to_string(),
            window: match method {
                Method::Window(d) => Some(d),
                _ => None,
            },
            buckets: match method {
                Method::Buckets(v) => Some(v),
                _ => None,
            },
            max_length: 0,
            allow_empty_move_set: config.allow_empty_move_set,
            lengths: String::new(),
            value_count: 0,
            status: "error".into(),
            table_cost: None,
            cost: None,
            relative_error: None,
            mean_length: None,
            wall_ms: 0.0,
            entries_computed: None,
            entries_skipped: None,
            est_bytes: 0,
            note: String::new(),
            command: String::new(),
        };
        match &instance {
            Err(msg) => record.note = msg.clone(),
            Ok(instance) => {
                run_method(
                    instance,
                    method,
                    config,
                    max_length,
                    &mut record,
                    exact_cost,
                );
                if method == Method::Exact && record.status == "ok" {
                    exact_cost = record.cost;
                }
            }
        }
        record.command = format_command(&record, config.mem_cap_bytes, config.timeout);
        records.push(record);
    }
    records
}

fn run_method(
    instance: &ProblemInstance,
    method: Method,
    config: &BenchConfig,
    max_length: MaxLength,
    record: &mut RunRecord,
    exact_cost: Option<f64>,
) {
    let mut options = SolverOptions {
        max_mean_length: max_length,
        allow_empty_move_set: config.allow_empty_move_set,
        mem_cap_bytes: config.mem_cap_bytes,
        timeout: Some(config.timeout),
        ..SolverOptions::default()
    };
    if let Method::Window(d) = method {
        options.window = Some(d);
    }
    record.lengths = instance
        .lengths()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";");
    record.value_count = build_value_set(instance).len();
    record.max_length = options.resolve_max_length(instance).unwrap_or(0);

    let started = Instant::now();
    let outcome = match method {
        Method::Exact | Method::Window(_) => {
            record.est_bytes = estimate_table_bytes(instance, &options).unwrap_or(0);
            compute_mean(instance, &options).map(|r| (r.cost, r.evaluated_cost, r))
        }
        Method::Buckets(v) => heuristic_mean_discretized(instance, v, &options).map(|d| {
            record.value_count = d.result.value_count;
            record.est_bytes = d.result.table_bytes;
            (d.result.cost, d.cost_on_original, d.result)
        }),
    };
    record.wall_ms = started.elapsed().as_secs_f64() * 1e3;

    match outcome {
        Ok((table_cost, cost, result)) => {
            record.status = "ok".into();
            record.table_cost = Some(table_cost);
            record.cost = Some(cost);
            record.mean_length = Some(result.mean_length);
            record.entries_computed = Some(result.table_entries_computed);
            record.entries_skipped = Some(result.table_entries_skipped);
            record.est_bytes = result.table_bytes;
            if method == Method::Exact {
                record.relative_error = Some(0.0);
            } else if let Some(exact) = exact_cost {
                record.relative_error = Some(relative_error(cost, exact));
            }
        }
        Err(Error::Timeout { .. }) => record.status = "timeout".into(),
        Err(e @ Error::MemoryCap { .. }) => {
            record.status = "memory_cap".into();
            record.note = e.to_string();
        }
        Err(e) => {
            record.status = "error".into();
            record.note = e.to_string();
        }
    }
}

/// Runs the sweep, handing each finished record to `sink` in completion order.
pub fn run_bench(
    config: &BenchConfig,
    mut sink: impl FnMut(&RunRecord) -> Result<()>,
) -> Result<Vec<RunRecord>> {
    if config.ks.is_empty() || config.ns.is_empty() || config.datasets.is_empty() {
        return Err(Error::InvalidOption(
            "sweep needs at least one dataset, k and n".into(),
        ));
    }
    if !config.exact && config.windows.is_empty() && config.buckets.is_empty() {
        return Err(Error::InvalidOption("sweep has no methods to run".into()));
    }
    let datasets = config
        .datasets
        .iter()
        .map(parse_ucr)
        .collect::<Result<Vec<_>>>()?;

    let per_task = usize::from(config.exact) + config.windows.len() + config.buckets.len();
    let mut tasks = Vec::new();
    for (di, ds) in datasets.iter().enumerate() {
        for &k in &config.ks {
            for &n in &config.ns {
                for class in ds.labels() {
                    tasks.push(Task {
                        dataset: di,
                        k,
                        n,
                        class: class.to_string(),
                    });
                }
            }
        }
    }

    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<Vec<RunRecord>>();
    let mut all = Vec::new();
    let mut sink_error = None;
    std::thread::scope(|scope| {
        for _ in 0..config.jobs.max(1) {
            let tx = tx.clone();
            let (tasks, datasets, next) = (&tasks, &datasets, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(task) = tasks.get(i) else { break };
                let records = run_instance(&datasets[task.dataset], task, config, i * per_task);
                if tx.send(records).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for batch in rx {
            for record in &batch {
                if sink_error.is_none() {
                    if let Err(e) = sink(record) {
                        sink_error = Some(e);
                    }
                }
            }
            all.extend(batch);
        }
    });
    if let Some(e) = sink_error {
        return Err(e);
    }
    all.sort_by_key(|r| r.run_id);
    Ok(all)
}

pub fn summarize(records: &[RunRecord]) -> Vec<Summary> {
    let mut keys: Vec<(usize, usize, String)> = records
        .iter()
        .map(|r| (r.k, r.n, r.method.clone()))
        .collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(k, n, method)| {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.k == k && r.n == n && r.method == method)
                .collect();
            let mut times: Vec<f64> = group
                .iter()
                .filter(|r| r.status == "ok")
                .map(|r| r.wall_ms)
                .collect();
            times.sort_by(f64::total_cmp);
            let mean_ms = if times.is_empty() {
                f64::NAN
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            };
            let median_ms = match times.len() {
                0 => f64::NAN,
                m if m % 2 == 1 => times[m / 2],
                m => (times[m / 2 - 1] + times[m / 2]) / 2.0,
            };
            Summary {
                k,
                n,
                method,
                runs: group.len(),
                ok: times.len(),
                mean_ms,
                median_ms,
            }
        })
        .collect()
}

/// CSV writer that emits the schema comment line before the header.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{CSV_SCHEMA}")?;
        Ok(Self {
            inner: csv::Writer::from_writer(out),
        })
    }

    pub fn write(&mut self, record: &RunRecord) -> Result<()> {
        self.inner
            .serialize(record)
            .and_then(|()| self.inner.flush().map_err(csv::Error::from))
            .map_err(|e| Error::InvalidOption(format!("cannot write CSV row: {e}")))
    }
}
