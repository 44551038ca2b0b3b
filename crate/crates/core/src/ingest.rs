//! UCR archive files and the sampling protocol that turns them into instances.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::series::{ProblemInstance, TimeSeries};

/// Default split/merge cost per UCR dataset, keyed by normalized name.
const DEFAULT_COSTS: &[(&str, f64)] = &[
    ("50words", 1.0),
    ("fiftywords", 1.0),
    ("adiac", 1.0),
    ("beef", 0.1),
    ("cbf", 0.1),
    ("coffee", 0.01),
    ("ecg", 1.0),
    ("ecg200", 1.0),
    ("faceall", 1.0),
    ("facefour", 1.0),
    ("fish", 0.1),
    ("gunpoint", 0.01),
    ("lightning2", 0.01),
    ("lightning7", 1.0),
    ("oliveoil", 0.01),
    ("osuleaf", 0.1),
    ("swedishleaf", 1.0),
    ("syntheticcontrol", 0.1),
    ("trace", 0.01),
    ("twopatterns", 1.0),
    ("wafer", 1.0),
    ("yoga", 0.1),
];

/// Lowercase alphanumerics of `name` with any `_TRAIN`/`_TEST` suffix removed.
fn normalize_name(name: &str) -> String {
    let mut base = name.to_string();
    for suffix in ["_TRAIN", "_TEST", "_train", "_test"] {
        if let Some(stripped) = base.strip_suffix(suffix) {
            base = stripped.to_string();
        }
    }
    base.chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Built-in split/merge cost for a known dataset name.
pub fn default_cost(name: &str) -> Option<f64> {
    let key = normalize_name(name);
    DEFAULT_COSTS
        .iter()
        .find(|(n, _)| *n == key)
        .map(|&(_, c)| c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub path: Option<PathBuf>,
    /// Every series carries its class label.
    pub series: Vec<TimeSeries>,
    pub default_c: Option<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, series: Vec<TimeSeries>) -> Result<Self> {
        let name = name.into();
        if series.is_empty() {
            return Err(Error::NoSeries(PathBuf::from(&name)));
        }
        if series.iter().any(|s| s.label().is_none_or(str::is_empty)) {
            return Err(Error::InvalidOption(
                "every dataset series needs a nonempty label".into(),
            ));
        }
        let default_c = default_cost(&name);
        Ok(Self {
            name,
            path: None,
            series,
            default_c,
        })
    }

    /// Sorted distinct labels.
    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self.series.iter().filter_map(|s| s.label()).collect();
        labels.sort_unstable();
        labels.dedup();
        labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Separator {
    Tab,
    Comma,
    Whitespace,
}

impl Separator {
    fn detect(line: &str) -> Self {
        if line.contains('\t') {
            Self::Tab
        } else if line.contains(',') {
            Self::Comma
        } else {
            Self::Whitespace
        }
    }

    fn split<'a>(self, line: &'a str) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match self {
            Self::Tab => Box::new(line.split('\t').map(str::trim)),
            Self::Comma => Box::new(line.split(',').map(str::trim)),
            Self::Whitespace => Box::new(line.split_whitespace()),
        }
    }
}

fn parse_value(field: &str, path: &Path, line: usize) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("not a number: {field:?}"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("non-finite value {field:?}"),
        });
    }
    Ok(value)
}

/// Parses UCR text: one series per line, class label first, then the
/// values. The separator (tab, comma, else whitespace) is taken from the
/// first data line.
pub fn parse_ucr_str(text: &str, path: &Path) -> Result<Vec<TimeSeries>> {
    let mut separator = None;
    let mut series = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let sep = *separator.get_or_insert_with(|| Separator::detect(line));
        let mut fields = sep
            .split(line.trim())
            .filter(|f| !f.is_empty() || sep == Separator::Whitespace);
        let label = fields.next().unwrap_or_default();
        if label.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: "missing class label".into(),
            });
        }
        let values = fields
            .map(|f| parse_value(f, path, line_no))
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: "no values after the label".into(),
            });
        }
        series.push(TimeSeries::new(values)?.with_label(label));
    }
    if series.is_empty() {
        return Err(Error::NoSeries(path.to_path_buf()));
    }
    Ok(series)
}

pub fn parse_ucr(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let series = parse_ucr_str(&text, path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut dataset = Dataset::new(name, series)?;
    dataset.path = Some(path.to_path_buf());
    Ok(dataset)
}

/// Reads a single unlabeled series: values separated by commas and/or whitespace.
pub fn parse_series_file(path: impl AsRef<Path>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_series_str(&text, path)
}

pub fn parse_series_str(text: &str, path: &Path) -> Result<TimeSeries> {
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for field in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if !field.is_empty() {
                values.push(parse_value(field, path, idx + 1)?);
            }
        }
    }
    if values.is_empty() {
        return Err(Error::NoSeries(path.to_path_buf()));
    }
    TimeSeries::new(values)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassMode {
    /// All series from one uniformly chosen class.
    OneClass,
    /// All series from the named class.
    Class(String),
    /// Series drawn across the whole dataset, spanning at least two classes
    /// whenever the dataset has two.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SamplePlan {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub class_mode: ClassMode,
}

const MIXED_ATTEMPTS: usize = 10_000;

/// Draws `k` distinct series (without replacement) and cuts a contiguous
/// window of length `n` from each at a uniform offset.
///
/// Draw order: class (one-class mode only), then the series, then one
/// offset per selected series in selection order.
pub fn sample_instance(dataset: &Dataset, plan: &SamplePlan, c: f64) -> Result<ProblemInstance> {
    if plan.k == 0 || plan.n == 0 {
        return Err(Error::InvalidOption("k and n must be at least 1".into()));
    }
    let eligible: Vec<&TimeSeries> = dataset
        .series
        .iter()
        .filter(|s| s.len() >= plan.n)
        .collect();
    if eligible.is_empty() {
        return Err(Error::NotEnoughSeries(format!(
            "no series of {} has length >= {}",
            dataset.name, plan.n
        )));
    }
    let mut by_label: BTreeMap<&str, Vec<&TimeSeries>> = BTreeMap::new();
    for s in &eligible {
        by_label.entry(s.label().unwrap_or("")).or_default().push(s);
    }

    let mut rng = SeededRng::new(plan.seed);
    let chosen: Vec<&TimeSeries> = match &plan.class_mode {
        ClassMode::OneClass => {
            let classes: Vec<&Vec<&TimeSeries>> =
                by_label.values().filter(|v| v.len() >= plan.k).collect();
            if classes.is_empty() {
                return Err(Error::NotEnoughSeries(format!(
                    "no class of {} has {} series of length >= {}",
                    dataset.name, plan.k, plan.n
                )));
            }
            let pool = classes[rng.below(classes.len())];
            rng.distinct(pool.len(), plan.k)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        }
        ClassMode::Class(label) => {
            let pool = by_label
                .get(label.as_str())
                .filter(|v| v.len() >= plan.k)
                .ok_or_else(|| {
                    Error::NotEnoughSeries(format!(
                        "class {label:?} of {} has fewer than {} series of length >= {}",
                        dataset.name, plan.k, plan.n
                    ))
                })?;
            rng.distinct(pool.len(), plan.k)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        }
        ClassMode::Mixed => {
            if eligible.len() < plan.k {
                return Err(Error::NotEnoughSeries(format!(
                    "{} has only {} series of length >= {}",
                    dataset.name,
                    eligible.len(),
                    plan.n
                )));
            }
            let need_two = plan.k >= 2 && by_label.len() >= 2;
            let mut attempt = 0;
            loop {
                let pick: Vec<&TimeSeries> = rng
                    .distinct(eligible.len(), plan.k)
                    .into_iter()
                    .map(|i| eligible[i])
                    .collect();
                let spans_two = pick.iter().any(|s| s.label() != pick[0].label());
                if !need_two || spans_two {
                    break pick;
                }
                attempt += 1;
                if attempt == MIXED_ATTEMPTS {
                    return Err(Error::NotEnoughSeries(
                        "could not draw series spanning two classes".into(),
                    ));
                }
            }
        }
    };

    let series = chosen
        .into_iter()
        .map(|s| {
            let start = rng.below(s.len() - plan.n + 1);
            let cut = TimeSeries::new(s.points()[start..start + plan.n].to_vec())?;
            Ok(match s.label() {
                Some(l) => cut.with_label(l),
                None => cut,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ProblemInstance::new(series, c)
}

/// Writes series in UCR tab-separated form. Unlabeled series get label `0`.
pub fn to_ucr_string(series: &[TimeSeries]) -> String {
    let mut out = String::new();
    for s in series {
        out.push_str(s.label().unwrap_or("0"));
        for v in s.points() {
            out.push('\t');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<TimeSeries>> {
        parse_ucr_str(text, Path::new("test.tsv"))
    }

    #[test]
    fn tab_line() {
        let s = parse("2\t0.5\t0.7\n").unwrap();
        assert_eq!(s[0].label(), Some("2"));
        assert_eq!(s[0].points(), &[0.5, 0.7]);
    }

    #[test]
    fn comma_line_with_crlf() {
        let s = parse("1,-0.3,0.0,0.3\r\n\r\n2,1,2\r\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].label(), Some("1"));
        assert_eq!(s[0].points(), &[-0.3, 0.0, 0.3]);
        assert_eq!(s[1].points(), &[1.0, 2.0]);
    }

    #[test]
    fn whitespace_fallback() {
        let s = parse("  1.0000000e+00  2.5e-01  -1.0e+00\n").unwrap();
        assert_eq!(s[0].label(), Some("1.0000000e+00"));
        assert_eq!(s[0].points(), &[0.25, -1.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse(""), Err(Error::NoSeries(_))));
        assert!(matches!(parse("\n \n"), Err(Error::NoSeries(_))));
        match parse("1\t0.5\n2\t0.5\tabc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("1\tNaN\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("1\tinf\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse("3\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            parse_ucr("/nonexistent/file.tsv"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn cost_lookup() {
        assert_eq!(default_cost("CBF_TRAIN"), Some(0.1));
        assert_eq!(default_cost("Gun_Point"), Some(0.01));
        assert_eq!(default_cost("FiftyWords"), Some(1.0));
        assert_eq!(default_cost("ItalyPowerDemand_TRAIN"), None);
        assert_eq!(default_cost("unknown"), None);
    }

    fn dataset() -> Dataset {
        let mut series = Vec::new();
        for (i, label) in ["a", "b", "a", "b", "a", "b", "a"].iter().enumerate() {
            let points = (0..8).map(|j| (i * 10 + j) as f64).collect();
            series.push(TimeSeries::new(points).unwrap().with_label(*label));
        }
        Dataset::new("toy", series).unwrap()
    }

    fn is_contiguous_cut(cut: &[f64], ds: &Dataset) -> bool {
        ds.series
            .iter()
            .any(|s| s.points().windows(cut.len()).any(|w| w == cut))
    }

    #[test]
    fn forced_single_draw() {
        let x = TimeSeries::new(vec![1.0, 2.0, 3.0])
            .unwrap()
            .with_label("1");
        let ds = Dataset::new("one", vec![x.clone()]).unwrap();
        for mode in [
            ClassMode::OneClass,
            ClassMode::Mixed,
            ClassMode::Class("1".into()),
        ] {
            let plan = SamplePlan {
                k: 1,
                n: 3,
                seed: 99,
                class_mode: mode,
            };
            let inst = sample_instance(&ds, &plan, 0.1).unwrap();
            assert_eq!(inst.series(), std::slice::from_ref(&x));
        }
    }

    #[test]
    fn sampling_is_reproducible_and_contiguous() {
        let ds = dataset();
        for mode in [ClassMode::OneClass, ClassMode::Mixed] {
            for seed in 0..20 {
                let plan = SamplePlan {
                    k: 3,
                    n: 5,
                    seed,
                    class_mode: mode.clone(),
                };
                let a = sample_instance(&ds, &plan, 0.1).unwrap();
                let b = sample_instance(&ds, &plan, 0.1).unwrap();
                assert_eq!(a, b);
                assert!(a.series().iter().all(|s| s.len() == 5));
                assert!(a
                    .series()
                    .iter()
                    .all(|s| is_contiguous_cut(s.points(), &ds)));
                // distinct sources: each source has a distinct tens digit
                let mut sources: Vec<i64> = a
                    .series()
                    .iter()
                    .map(|s| (s.points()[0] / 10.0) as i64)
                    .collect();
                sources.sort();
                sources.dedup();
                assert_eq!(sources.len(), 3);

                let labels: Vec<_> = a.series().iter().map(|s| s.label()).collect();
                match mode {
                    ClassMode::OneClass => assert!(labels.iter().all(|l| *l == labels[0])),
                    ClassMode::Mixed => assert!(labels.iter().any(|l| *l != labels[0])),
                    ClassMode::Class(_) => unreachable!(),
                }
            }
        }
    }

    #[test]
    fn sampling_errors() {
        let ds = dataset();
        let plan = |k, n, class_mode| SamplePlan {
            k,
            n,
            seed: 1,
            class_mode,
        };
        assert!(matches!(
            sample_instance(&ds, &plan(1, 9, ClassMode::Mixed), 0.1),
            Err(Error::NotEnoughSeries(_))
        ));
        assert!(matches!(
            sample_instance(&ds, &plan(5, 3, ClassMode::OneClass), 0.1),
            Err(Error::NotEnoughSeries(_))
        ));
        assert!(sample_instance(&ds, &plan(4, 3, ClassMode::Class("a".into())), 0.1).is_ok());
        assert!(sample_instance(&ds, &plan(4, 3, ClassMode::Class("b".into())), 0.1).is_err());
        assert!(sample_instance(&ds, &plan(8, 3, ClassMode::Mixed), 0.1).is_err());
    }

    #[test]
    fn ucr_round_trip() {
        let ds = dataset();
        let text = to_ucr_string(&ds.series);
        assert_eq!(parse(&text).unwrap(), ds.series);
    }

    #[test]
    fn series_file_format() {
        let s = parse_series_str("1, 2.5,\n-3\n", Path::new("s.txt")).unwrap();
        assert_eq!(s.points(), &[1.0, 2.5, -3.0]);
        assert!(parse_series_str("\n", Path::new("s.txt")).is_err());
    }
}
