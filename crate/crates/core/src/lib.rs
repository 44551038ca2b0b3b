//! Means of time series under the Move-Split-Merge (MSM) metric.
//!
//! The exact solver fills a dense table indexed by a position in every
//! input series, a position in the mean and a candidate value; the
//! candidate values are exactly the point values of the inputs. Window and
//! discretization heuristics trade exactness for speed, and a brute-force
//! oracle cross-checks the solver on small instances.

pub mod bench;
pub mod discretize;
pub mod distance;
pub mod error;
pub mod ingest;
pub mod mean;
pub mod options;
pub mod oracle;
mod rng;
pub mod series;
pub mod verify;

pub use discretize::{
    discretize_instance, heuristic_mean_discretized, BucketSpec, DiscretizedMean,
};
pub use distance::{cost_c, msm_distance, msm_distance_slices, sum_distance};
pub use error::{Error, Result};
pub use ingest::{parse_ucr, sample_instance, ClassMode, Dataset, SamplePlan};
pub use mean::{compute_mean, fill_table, traceback, MeanResult, MeanTable};
pub use options::{FillStrategy, MaxLength, SolverOptions};
pub use oracle::{brute_force_mean, check_metric_axioms, MetricReport, OracleBudget};
pub use series::{build_value_set, ProblemInstance, TimeSeries, ValueSet};
