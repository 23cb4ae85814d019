//! Benchmark harness for bag selection: success-rate reports with confidence
//! intervals, `eta` grid search, one-shot relation evaluation and the
//! `bagsel` command-line tool.

pub mod cli;
pub mod gridsearch;
pub mod oneshot;
pub mod pipeline;
pub mod report;
pub mod stats;

pub use gridsearch::{default_eta_grid, grid_search_eta, GridSearchOutcome};
pub use oneshot::{one_shot_eval, OneShotResult};
pub use pipeline::{train_models, tune_eta};
pub use report::{run_benchmark, BenchConfig, BenchmarkReport, EpisodeResult, Method, Models, ReportRow};
pub use stats::confidence_interval;
