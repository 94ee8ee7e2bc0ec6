use std::fmt::Write as _;

use anyhow::{bail, Result};
use lcca_core::{captured_correlation_sum, Algorithm};
use serde::Serialize;

use crate::config::RunConfig;
use crate::data::load;
use crate::run::{execute, format_number, oracle, Oracle};

/// One line of a comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub algorithm: Algorithm,
    pub parameters: String,
    pub wall_time_seconds: f64,
    pub work: u64,
    pub correlation_sum: f64,
    pub correlations: Vec<f64>,
    pub dist_x: Option<f64>,
    pub dist_y: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub k_cca: usize,
    /// Work of the first run when the others were matched to it.
    pub budget: Option<u64>,
    pub oracle_sum: Option<f64>,
    pub rows: Vec<Row>,
}

/// Runs every config on their shared dataset. With `match_budget`, every
/// config after the first has its budget knob set so that its predicted
/// work does not exceed the first run's recorded work.
pub fn compare(configs: &[RunConfig], match_budget: bool) -> Result<Comparison> {
    let Some(first) = configs.first() else {
        bail!("compare needs at least one config");
    };
    for c in &configs[1..] {
        if c.data != first.data {
            bail!(
                "{} config uses a different dataset than {}",
                c.name(),
                first.name()
            );
        }
        if c.k_cca != first.k_cca {
            bail!("k_cca differs: {} vs {}", c.k_cca, first.k_cca);
        }
    }
    let algorithms = configs
        .iter()
        .map(RunConfig::resolve)
        .collect::<Result<Vec<_>>>()?;
    let data = load(&first.data)?;
    let oracle: Option<Oracle> = if configs.iter().any(|c| c.oracle_compare) {
        Some(oracle(&data, first.k_cca, configs.iter().any(|c| c.ridge))?)
    } else {
        None
    };

    let mut rows = Vec::with_capacity(configs.len());
    let mut budget = None;
    for (i, (config, algorithm)) in configs.iter().zip(algorithms).enumerate() {
        let algorithm = match budget {
            Some(b) if match_budget => algorithm.matched_to(b, &data.x, &data.y, config.k_cca),
            _ => algorithm,
        };
        let mut config = config.clone();
        config.set_parameters(&algorithm);
        let outcome = execute(&config, algorithm, &data, oracle.as_ref())?;
        if i == 0 && match_budget {
            budget = Some(outcome.result.work.total());
        }
        let r = &outcome.result;
        rows.push(Row {
            algorithm,
            parameters: describe(&algorithm),
            wall_time_seconds: r.wall_time,
            work: r.work.total(),
            correlation_sum: captured_correlation_sum(r),
            correlations: r.correlations.clone(),
            dist_x: outcome.oracle.as_ref().map(|o| o.dist_x),
            dist_y: outcome.oracle.as_ref().map(|o| o.dist_y),
        });
    }
    Ok(Comparison {
        k_cca: first.k_cca,
        budget,
        oracle_sum: oracle.map(|o| o.correlations.iter().sum()),
        rows,
    })
}

pub fn describe(algorithm: &Algorithm) -> String {
    match *algorithm {
        Algorithm::Exact { ridge } => format!("ridge={ridge}"),
        Algorithm::Lcca { t1, t2, k_pc, .. } => format!("t1={t1} t2={t2} k_pc={k_pc}"),
        Algorithm::Dcca { t1 } => format!("t1={t1}"),
        Algorithm::Gcca { t1, t2 } => format!("t1={t1} t2={t2}"),
        Algorithm::Rpcca { k_rpcca, .. } => format!("k_rpcca={k_rpcca}"),
    }
}

impl Comparison {
    /// CSV with one row per run and one column per canonical pair.
    pub fn to_csv(&self) -> String {
        let mut s =
            String::from("algorithm,parameters,wall_seconds,work,correlation_sum,dist_x,dist_y");
        for i in 1..=self.k_cca {
            write!(s, ",c{i}").unwrap();
        }
        s.push('\n');
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        for r in &self.rows {
            write!(
                s,
                "{},{},{:.3},{},{},{},{}",
                r.algorithm.name(),
                r.parameters,
                r.wall_time_seconds,
                r.work,
                format_number(r.correlation_sum),
                opt(r.dist_x),
                opt(r.dist_y)
            )
            .unwrap();
            for c in &r.correlations {
                write!(s, ",{}", format_number(*c)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Aligned summary for a terminal.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<8} {:<26} {:>10} {:>14} {:>12}\n",
            "algo", "parameters", "seconds", "work", "corr sum"
        );
        for r in &self.rows {
            writeln!(
                s,
                "{:<8} {:<26} {:>10.3} {:>14} {:>12.6}",
                r.algorithm.name(),
                r.parameters,
                r.wall_time_seconds,
                r.work,
                r.correlation_sum
            )
            .unwrap();
        }
        if let Some(sum) = self.oracle_sum {
            writeln!(s, "oracle correlation sum {sum:.6}").unwrap();
        }
        s
    }
}
