//! Seeded experiments: source generation, full pipeline runs, aggregation and reports.
//!
//! Run `r` of a configuration uses seed `seed + r`; every stochastic stage draws
//! from its own stream of that seed, so a configuration and seed fully determine
//! the report (apart from wall-times, which can be switched off).

mod config;
mod dataset;
mod report;
mod run;
mod stats;

pub use config::{Clustering, Dataset, DynamicsKind, Estimator, ExperimentConfig};
pub use dataset::{generate_drivers, generate_sources, SourceSummary, Sources};
pub use report::{read_csv_column, read_matrix_csv, save_report, write_matrix_csv, write_summary_csv};
pub use run::{random_orthogonal, run_experiment, run_single, IcaDiagnostics, RunRecord, RunReport, StageTimings};
pub use stats::{boxplot_stats, median, quantile, BoxStats};
