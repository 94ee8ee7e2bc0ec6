use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use lcca_core::{
    captured_correlation_sum, exact_cca, subspace_dist, Algorithm, CcaResult, ConvergenceTrace,
    Diagnostics, Error, ExactOptions, SubspaceReference, Work,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::data::{load, Dataset};

pub const CORRELATIONS_FILE: &str = "correlations.csv";
pub const RUN_FILE: &str = "run.json";
pub const TRACE_FILE: &str = "trace.csv";

/// How far a run landed from the exact oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleComparison {
    pub correlations: Vec<f64>,
    pub correlation_sum: f64,
    pub dist_x: f64,
    pub dist_y: f64,
}

/// Contents of `run.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub algorithm: Algorithm,
    pub shape: Shape,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub work: WorkReport,
    pub captured_correlation_sum: f64,
    pub correlations: Vec<f64>,
    pub diagnostics: Diagnostics,
    pub oracle: Option<OracleComparison>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Shape {
    pub n: usize,
    pub p1: usize,
    pub p2: usize,
    pub nnz_x: usize,
    pub nnz_y: usize,
}

impl Shape {
    pub fn of(data: &Dataset) -> Self {
        Self {
            n: data.x.n_rows(),
            p1: data.x.n_cols(),
            p2: data.y.n_cols(),
            nnz_x: data.x.nnz(),
            nnz_y: data.y.nnz(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WorkReport {
    pub sparse_products: u64,
    pub sparse_madds: u64,
    pub dense_madds: u64,
    pub total: u64,
}

impl From<Work> for WorkReport {
    fn from(w: Work) -> Self {
        Self {
            sparse_products: w.sparse_products,
            sparse_madds: w.sparse_madds,
            dense_madds: w.dense_madds,
            total: w.total(),
        }
    }
}

/// A finished run before anything is written.
#[derive(Debug)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub result: CcaResult,
    pub oracle: Option<OracleComparison>,
}

/// Oracle bases and correlations for `data`.
pub struct Oracle {
    pub correlations: Vec<f64>,
    pub reference: SubspaceReference,
}

pub fn oracle(data: &Dataset, k_cca: usize, ridge: bool) -> Result<Oracle> {
    let f = exact_cca(&data.x, &data.y, k_cca, ExactOptions { ridge })
        .context("exact oracle failed")?;
    Ok(Oracle {
        correlations: f.d[..k_cca].to_vec(),
        reference: f.reference(&data.x, &data.y)?,
    })
}

pub fn compare_to(result: &CcaResult, oracle: &Oracle) -> Result<OracleComparison> {
    Ok(OracleComparison {
        correlation_sum: oracle.correlations.iter().sum(),
        correlations: oracle.correlations.clone(),
        dist_x: subspace_dist(&result.x_basis, &oracle.reference.x)?,
        dist_y: subspace_dist(&result.y_basis, &oracle.reference.y)?,
    })
}

/// Runs `algorithm` on loaded data, measuring it against `oracle` when
/// given. A rank collapse surfaces as [`Error::RankCollapse`] carrying the
/// partial trace.
pub fn execute(
    config: &RunConfig,
    algorithm: Algorithm,
    data: &Dataset,
    oracle: Option<&Oracle>,
) -> Result<Outcome> {
    let reference = oracle.map(|o| &o.reference);
    let mut result = algorithm.run(&data.x, &data.y, config.k_cca, config.seed, reference)?;
    if !config.trace {
        result.trace = None;
    }
    let oracle = oracle.map(|o| compare_to(&result, o)).transpose()?;
    Ok(Outcome {
        algorithm,
        result,
        oracle,
    })
}

/// Loads the data, runs, and writes `correlations.csv`, `run.json` and
/// (when requested) `trace.csv` into the configured output directory.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let algorithm = config.resolve()?;
    let out = config
        .out
        .as_deref()
        .context("run needs an output directory")?;
    let data = load(&config.data)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let oracle = if config.oracle_compare {
        Some(oracle(&data, config.k_cca, config.ridge)?)
    } else {
        None
    };
    let outcome = match execute(config, algorithm, &data, oracle.as_ref()) {
        Ok(o) => o,
        Err(e) => {
            if let (true, Some(Error::RankCollapse { trace, .. })) =
                (config.trace, e.downcast_ref())
            {
                write_file(&out.join(TRACE_FILE), &format_trace(trace))?;
            }
            return Err(e);
        }
    };
    let result = &outcome.result;
    write_file(
        &out.join(CORRELATIONS_FILE),
        &format_correlations(&result.correlations),
    )?;
    if let Some(trace) = &result.trace {
        write_file(&out.join(TRACE_FILE), &format_trace(trace))?;
    }
    let report = RunReport {
        config: config.clone(),
        algorithm,
        shape: Shape::of(&data),
        seed: result.seed,
        wall_time_seconds: result.wall_time,
        work: result.work.into(),
        captured_correlation_sum: captured_correlation_sum(result),
        correlations: result.correlations.clone(),
        diagnostics: result.diagnostics.clone(),
        oracle: outcome.oracle,
    };
    write_file(&out.join(RUN_FILE), &serde_json::to_string_pretty(&report)?)?;
    Ok(report)
}

/// Twelve significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

/// `index,correlation` with 1-based indices.
pub fn format_correlations(correlations: &[f64]) -> String {
    let mut s = String::from("index,correlation\n");
    for (i, c) in correlations.iter().enumerate() {
        writeln!(s, "{},{}", i + 1, format_number(*c)).unwrap();
    }
    s
}

/// One row per outer iteration. Wall-clock time lives only in `run.json`
/// so that this file is reproducible byte for byte.
pub fn format_trace(trace: &ConvergenceTrace) -> String {
    let mut s = String::from("iteration,dist_x,dist_y,correlation_sum,work,repairs\n");
    let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
    for r in &trace.records {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.iteration,
            opt(r.dist_x),
            opt(r.dist_y),
            format_number(r.correlation_sum),
            r.work,
            r.repairs
        )
        .unwrap();
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
