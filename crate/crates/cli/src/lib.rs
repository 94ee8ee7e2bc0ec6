//! Experiment runner for the `lcca-core` algorithms: single runs with CSV
//! and JSON output, and side-by-side comparisons at a matched work budget.

pub mod compare;
pub mod config;
pub mod data;
pub mod run;

pub use compare::{compare, Comparison, Row};
pub use config::{AlgoName, DataSource, MatrixFormat, RunConfig, DEFAULT_K_CCA};
pub use data::{load, Dataset};
pub use run::{execute, format_correlations, format_trace, run, Outcome, RunReport};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "LCCA_NUM_THREADS";
