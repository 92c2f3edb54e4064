//! Benchmark statistics: metrics, replicate runs, Tukey HSD winner sets, win
//! rates and the activity-cliff consistency test.

mod bench;
mod distributions;
mod hsd;
mod metrics;

use thiserror::Error;

pub use bench::{
    build_report, evaluate_replicate, load_benchmark, load_suite, parse_benchmark_csv,
    parse_results_csv, parse_suite, read_results_csv, run_replicates, run_suite, write_results_csv,
    BenchReport, BenchmarkData, BenchmarkOutcome, BoxError, ConsistencyRow, ModelSummary,
    ReplicateModel, ReplicateResult, SuiteEntry,
};
pub use distributions::{
    normal_cdf, studentized_range_cdf, studentized_range_quantile, t_cdf, t_sf,
};
pub use hsd::{
    aggregate_wins, cliff_consistency, tukey_hsd, win_rate, CliffResult, HsdResult, WinSummary,
};
pub use metrics::{average_precision, mae, r2, rmse, roc_auc, Metric, MetricError, Orientation};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NoConvergence(String),
    #[error("{0}")]
    Format(String),
    #[error("{0}")]
    Io(String),
    #[error("benchmark '{benchmark}', model '{model}', seed {seed}: {message}")]
    Replicate {
        benchmark: String,
        model: String,
        seed: u64,
        message: String,
    },
}
