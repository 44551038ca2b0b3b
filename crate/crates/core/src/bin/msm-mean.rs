use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use msm_mean::bench::{run_bench, summarize, BenchConfig, RecordWriter};
use msm_mean::ingest::{parse_series_file, parse_series_str, to_ucr_string};
use msm_mean::oracle::OracleBudget;
use msm_mean::verify::{run_verify, VerifyConfig};
use msm_mean::{
    build_value_set, compute_mean, heuristic_mean_discretized, msm_distance, parse_ucr,
    sample_instance, ClassMode, Error, MaxLength, ProblemInstance, SamplePlan, SolverOptions,
    TimeSeries,
};

const EXIT_FAILURE: u8 = 1;
const EXIT_MEMORY: u8 = 3;
const EXIT_CONFIG: u8 = 4;
const EXIT_TIMEOUT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "msm-mean",
    version,
    about = "Means of time series under the Move-Split-Merge metric"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise MSM distance of two series.
    Distance(DistanceArgs),
    /// Mean of a set of series.
    Mean(MeanArgs),
    /// Timing sweep over sampled UCR instances, one CSV row per run.
    Bench(BenchArgs),
    /// Cross-check the solver against brute force and sampled properties.
    Verify(VerifyArgs),
    /// Draw an instance from a UCR file and print it in UCR format.
    Sample(SampleArgs),
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    /// Comma-separated values.
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "x_file",
        required_unless_present = "x_file"
    )]
    x: Option<String>,
    #[arg(long)]
    x_file: Option<PathBuf>,
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "y_file",
        required_unless_present = "y_file"
    )]
    y: Option<String>,
    #[arg(long)]
    y_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SampleFlags {
    /// UCR-format file (label first, tab or comma separated).
    #[arg(long)]
    ucr: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `one-class`, `mixed` or `class:<label>`.
    #[arg(long, default_value = "one-class", value_parser = parse_class_mode)]
    class_mode: ClassMode,
}

#[derive(Args, Clone)]
struct OutputFlags {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeanArgs {
    #[command(flatten)]
    sample: SampleFlags,
    /// Comma-separated list of files holding one series each.
    #[arg(long, value_delimiter = ',', conflicts_with = "ucr")]
    series: Vec<PathBuf>,
    /// Split/merge cost; defaults to the built-in value for known UCR datasets.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    /// Positive integer or `unbounded`. Defaults to the longest input length.
    #[arg(long, value_parser = parse_max_length)]
    max_length: Option<MaxLength>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    buckets: Option<usize>,
    #[arg(long)]
    allow_empty_move_set: bool,
    #[arg(long, default_value_t = 8.0)]
    mem_cap_gib: f64,
    #[arg(long)]
    timeout_s: Option<f64>,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    ucr: Vec<PathBuf>,
    #[arg(long, value_parser = parse_usize_list, default_value = "3")]
    k: UsizeList,
    /// List (`10,11`) or inclusive range (`10..12`).
    #[arg(long, value_parser = parse_usize_list, default_value = "10")]
    n: UsizeList,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, value_parser = parse_usize_list)]
    window: Option<UsizeList>,
    #[arg(long, value_parser = parse_usize_list)]
    buckets: Option<UsizeList>,
    /// Skip the exact run of each instance.
    #[arg(long)]
    no_exact: bool,
    /// Positive integer or `unbounded`. Defaults to the sample length.
    #[arg(long, value_parser = parse_max_length)]
    max_length: Option<MaxLength>,
    #[arg(long)]
    allow_empty_move_set: bool,
    #[arg(long, default_value_t = 600.0)]
    timeout_s: f64,
    #[arg(long, default_value_t = 8.0)]
    mem_cap_gib: f64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 60)]
    instances: usize,
    #[arg(long, default_value_t = 3)]
    max_k: usize,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    #[arg(long, default_value_t = 4)]
    max_values: usize,
    #[arg(long, default_value_t = 2_000_000)]
    max_candidates: u128,
    #[arg(long, default_value_t = 1000)]
    metric_samples: usize,
    #[arg(long, default_value_t = 20)]
    window_instances: usize,
    /// Use this cost for every generated instance.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    sample: SampleFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct UsizeList(Vec<usize>);

fn parse_usize_list(s: &str) -> Result<UsizeList, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {part}"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse(part)?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(UsizeList(out))
}

fn parse_max_length(s: &str) -> Result<MaxLength, String> {
    if s.eq_ignore_ascii_case("unbounded") {
        return Ok(MaxLength::Unbounded);
    }
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!(
            "expected a positive integer or `unbounded`, got {s:?}"
        )),
        Ok(n) => Ok(MaxLength::Fixed(n)),
    }
}

fn parse_class_mode(s: &str) -> Result<ClassMode, String> {
    match s {
        "one-class" => Ok(ClassMode::OneClass),
        "mixed" => Ok(ClassMode::Mixed),
        _ => match s.strip_prefix("class:") {
            Some(label) if !label.is_empty() => Ok(ClassMode::Class(label.to_string())),
            _ => Err(format!(
                "expected one-class, mixed or class:<label>, got {s:?}"
            )),
        },
    }
}

/// Shortest decimal with at least 12 significant digits, trailing zeros trimmed.
fn format_value(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn gib_to_bytes(gib: f64) -> Result<u64, Error> {
    if !(gib.is_finite() && gib > 0.0) {
        return Err(Error::InvalidOption(format!(
            "memory cap must be positive, got {gib}"
        )));
    }
    Ok((gib * (1u64 << 30) as f64) as u64)
}

fn timeout(secs: f64) -> Result<Duration, Error> {
    Duration::try_from_secs_f64(secs)
        .map_err(|_| Error::InvalidOption(format!("invalid timeout {secs}")))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| {
            Error::Io {
                path: p.to_path_buf(),
                source,
            }
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_err(e: io::Error) -> Error {
    Error::Io {
        path: PathBuf::from("<output>"),
        source: e,
    }
}

fn cmd_distance(args: DistanceArgs) -> Result<(), Error> {
    let read = |inline: Option<String>, file: Option<PathBuf>| -> Result<TimeSeries, Error> {
        match (inline, file) {
            (Some(text), _) => parse_series_str(&text, Path::new("<inline>")),
            (None, Some(path)) => parse_series_file(path),
            (None, None) => Err(Error::InvalidOption("missing series".into())),
        }
    };
    let x = read(args.x, args.x_file)?;
    let y = read(args.y, args.y_file)?;
    ProblemInstance::new(vec![x.clone()], args.c)?;
    println!("{}", format_value(msm_distance(&x, &y, args.c)));
    Ok(())
}

fn load_instance(
    sample: &SampleFlags,
    series: &[PathBuf],
    c: Option<f64>,
) -> Result<ProblemInstance, Error> {
    if let Some(path) = &sample.ucr {
        let dataset = parse_ucr(path)?;
        let c = c.or(dataset.default_c).ok_or_else(|| {
            Error::InvalidOption(format!("no built-in cost for {}; pass --c", dataset.name))
        })?;
        return match (sample.k, sample.n) {
            (Some(k), Some(n)) => {
                let plan = SamplePlan {
                    k,
                    n,
                    seed: sample.seed,
                    class_mode: sample.class_mode.clone(),
                };
                sample_instance(&dataset, &plan, c)
            }
            (None, None) => ProblemInstance::new(dataset.series, c),
            _ => Err(Error::InvalidOption(
                "--k and --n must be given together".into(),
            )),
        };
    }
    if series.is_empty() {
        return Err(Error::InvalidOption("give --ucr or --series".into()));
    }
    let c = c.ok_or_else(|| Error::InvalidOption("--c is required with --series".into()))?;
    let series = series
        .iter()
        .map(parse_series_file)
        .collect::<Result<Vec<_>, _>>()?;
    ProblemInstance::new(series, c)
}

#[derive(Serialize)]
struct InstanceSummary {
    k: usize,
    lengths: Vec<usize>,
    value_count: usize,
    c: f64,
}

#[derive(Serialize)]
struct MeanOutput {
    instance: InstanceSummary,
    #[serde(flatten)]
    result: msm_mean::MeanResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    discretization: Option<DiscretizationOutput>,
}

#[derive(Serialize)]
struct DiscretizationOutput {
    buckets: msm_mean::BucketSpec,
    cost_on_original: f64,
}

fn cmd_mean(args: MeanArgs) -> Result<(), Error> {
    let instance = load_instance(&args.sample, &args.series, args.c)?;
    let mut options = SolverOptions {
        max_mean_length: args
            .max_length
            .unwrap_or(MaxLength::Fixed(instance.max_len())),
        window: args.window,
        allow_empty_move_set: args.allow_empty_move_set,
        mem_cap_bytes: gib_to_bytes(args.mem_cap_gib)?,
        ..SolverOptions::default()
    };
    if let Some(secs) = args.timeout_s {
        options.timeout = Some(timeout(secs)?);
    }

    let (result, discretization) = match args.buckets {
        Some(v) => {
            let d = heuristic_mean_discretized(&instance, v, &options)?;
            let extra = DiscretizationOutput {
                buckets: d.buckets,
                cost_on_original: d.cost_on_original,
            };
            (d.result, Some(extra))
        }
        None => (compute_mean(&instance, &options)?, None),
    };
    let output = MeanOutput {
        instance: InstanceSummary {
            k: instance.k(),
            lengths: instance.lengths(),
            value_count: build_value_set(&instance).len(),
            c: instance.c(),
        },
        result,
        discretization,
    };

    let mut out = open_output(args.output.out.as_deref())?;
    if args.output.csv {
        write_mean_csv(&mut out, &output)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &output).map_err(|e| io_err(e.into()))?;
        writeln!(out).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

fn write_mean_csv(out: &mut dyn Write, o: &MeanOutput) -> Result<(), Error> {
    let r = &o.result;
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(";");
    let mut w = csv::Writer::from_writer(out);
    let header = [
        "k",
        "lengths",
        "value_count",
        "c",
        "max_length",
        "window",
        "buckets",
        "cost",
        "evaluated_cost",
        "cost_on_original",
        "mean_length",
        "wall_s",
        "entries_computed",
        "entries_skipped",
        "table_bytes",
        "mean",
    ];
    let max_length = match r.options_used.max_mean_length {
        MaxLength::Fixed(l) => l.to_string(),
        MaxLength::Unbounded => "unbounded".into(),
    };
    let row = vec![
        o.instance.k.to_string(),
        join(&mut o.instance.lengths.iter().map(usize::to_string)),
        o.instance.value_count.to_string(),
        o.instance.c.to_string(),
        max_length,
        r.options_used
            .window
            .map(|d| d.to_string())
            .unwrap_or_default(),
        o.discretization
            .as_ref()
            .map(|d| d.buckets.v.to_string())
            .unwrap_or_default(),
        r.cost.to_string(),
        r.evaluated_cost.to_string(),
        o.discretization
            .as_ref()
            .map(|d| d.cost_on_original.to_string())
            .unwrap_or_default(),
        r.mean_length.to_string(),
        r.wall_time.as_secs_f64().to_string(),
        r.table_entries_computed.to_string(),
        r.table_entries_skipped.to_string(),
        r.table_bytes.to_string(),
        join(&mut r.mean.points().iter().map(f64::to_string)),
    ];
    let err = |e: csv::Error| io_err(e.into());
    w.write_record(header).map_err(err)?;
    w.write_record(row).map_err(err)?;
    w.flush().map_err(io_err)
}

fn cmd_bench(args: BenchArgs) -> Result<(), Error> {
    let config = BenchConfig {
        datasets: args.ucr,
        ks: args.k.0,
        ns: args.n.0,
        seed: args.seed,
        c: args.c,
        exact: !args.no_exact,
        windows: args.window.map(|w| w.0).unwrap_or_default(),
        buckets: args.buckets.map(|b| b.0).unwrap_or_default(),
        max_length: args.max_length,
        allow_empty_move_set: args.allow_empty_move_set,
        timeout: timeout(args.timeout_s)?,
        mem_cap_bytes: gib_to_bytes(args.mem_cap_gib)?,
        jobs: args.jobs,
    };
    let mut writer = RecordWriter::new(open_output(args.out.as_deref())?).map_err(io_err)?;
    let records = run_bench(&config, |r| writer.write(r))?;

    let mut err = io::stderr().lock();
    writeln!(
        err,
        "{:>3} {:>4} {:>8} {:>5} {:>5} {:>12} {:>12}",
        "k", "n", "method", "runs", "ok", "mean_ms", "median_ms"
    )
    .map_err(io_err)?;
    for s in summarize(&records) {
        writeln!(
            err,
            "{:>3} {:>4} {:>8} {:>5} {:>5} {:>12.3} {:>12.3}",
            s.k, s.n, s.method, s.runs, s.ok, s.mean_ms, s.median_ms
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<bool, Error> {
    let config = VerifyConfig {
        seed: args.seed,
        instances: args.instances,
        budget: OracleBudget {
            max_k: args.max_k,
            max_len: args.max_len,
            max_values: args.max_values,
            max_candidates: args.max_candidates,
        },
        c: args.c,
        metric_samples: args.metric_samples,
        window_instances: args.window_instances,
    };
    if config.budget.max_k == 0 || config.budget.max_len == 0 || config.budget.max_values == 0 {
        return Err(Error::InvalidOption(
            "budget limits must be positive".into(),
        ));
    }
    let report = run_verify(&config)?;
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| io_err(e.into()))?
        );
    } else {
        println!("seed {}", report.seed);
        for check in &report.checks {
            println!(
                "{} {} ({})",
                if check.passed { "PASS" } else { "FAIL" },
                check.name,
                check.detail
            );
            for ex in &check.counterexamples {
                println!("    {ex}");
            }
        }
    }
    Ok(report.passed())
}

fn cmd_sample(args: SampleArgs) -> Result<(), Error> {
    let path = args
        .sample
        .ucr
        .as_ref()
        .ok_or_else(|| Error::InvalidOption("--ucr is required".into()))?;
    let (Some(k), Some(n)) = (args.sample.k, args.sample.n) else {
        return Err(Error::InvalidOption("--k and --n are required".into()));
    };
    let dataset = parse_ucr(path)?;
    let plan = SamplePlan {
        k,
        n,
        seed: args.sample.seed,
        class_mode: args.sample.class_mode,
    };
    // The cost does not affect sampling.
    let instance = sample_instance(&dataset, &plan, dataset.default_c.unwrap_or(0.0))?;
    let mut out = open_output(args.out.as_deref())?;
    out.write_all(to_ucr_string(instance.series()).as_bytes())
        .map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MemoryCap { .. } => EXIT_MEMORY,
        Error::WindowTooSmall { .. } | Error::InvalidOption(_) | Error::InvalidCost(_) => {
            EXIT_CONFIG
        }
        Error::Timeout { .. } => EXIT_TIMEOUT,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Distance(a) => cmd_distance(a).map(|()| true),
        Command::Mean(a) => cmd_mean(a).map(|()| true),
        Command::Bench(a) => cmd_bench(a).map(|()| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Sample(a) => cmd_sample(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_formatting() {
        assert_eq!(format_value(8.299999999999999), "8.3");
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(1.5), "1.5");
        assert_eq!(format_value(123456.7890123456), "123456.789012");
        assert_eq!(format_value(1.234567890123e-5), "0.0000123456789012");
    }

    #[test]
    fn list_parsing() {
        assert_eq!(parse_usize_list("10..12").unwrap().0, vec![10, 11, 12]);
        assert_eq!(parse_usize_list("3,5").unwrap().0, vec![3, 5]);
        assert_eq!(parse_usize_list("1..=2,7").unwrap().0, vec![1, 2, 7]);
        assert!(parse_usize_list("5..3").is_err());
        assert!(parse_usize_list("x").is_err());
        assert!(matches!(
            parse_max_length("unbounded"),
            Ok(MaxLength::Unbounded)
        ));
        assert!(parse_max_length("0").is_err());
        assert!(matches!(parse_class_mode("class:2"), Ok(ClassMode::Class(l)) if l == "2"));
        assert!(parse_class_mode("class:").is_err());
    }
}
