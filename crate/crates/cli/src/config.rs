use std::path::PathBuf;

use anyhow::{bail, ensure, Result};
use lcca_core::ingest::{SynthSpec, TokenDatasetSpec};
use lcca_core::{Algorithm, RsvdParams};
use serde::{Deserialize, Serialize};

pub const DEFAULT_K_CCA: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AlgoName {
    Exact,
    Lcca,
    Dcca,
    Gcca,
    Rpcca,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MatrixFormat {
    Mtx,
    Libsvm,
}

/// Where the two views come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataSource {
    Files {
        x: PathBuf,
        y: PathBuf,
        format: MatrixFormat,
        /// Column counts, required for libsvm.
        #[serde(default)]
        x_cols: Option<usize>,
        #[serde(default)]
        y_cols: Option<usize>,
    },
    Synth(SynthSpec),
    Tokens(TokenDatasetSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: AlgoName,
    pub data: DataSource,
    #[serde(default = "default_k_cca")]
    pub k_cca: usize,
    #[serde(default)]
    pub t1: Option<usize>,
    #[serde(default)]
    pub t2: Option<usize>,
    #[serde(default)]
    pub k_pc: Option<usize>,
    #[serde(default)]
    pub k_rpcca: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; required by `run`, ignored by `compare`.
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Ridge repair of singular Grams in the exact oracle.
    #[serde(default)]
    pub ridge: bool,
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub oracle_compare: bool,
}

fn default_k_cca() -> usize {
    DEFAULT_K_CCA
}

impl RunConfig {
    pub fn new(algorithm: AlgoName, data: DataSource) -> Self {
        Self {
            algorithm,
            data,
            k_cca: DEFAULT_K_CCA,
            t1: None,
            t2: None,
            k_pc: None,
            k_rpcca: None,
            seed: 0,
            out: None,
            ridge: false,
            trace: false,
            oracle_compare: false,
        }
    }

    /// Checks that exactly the parameters the algorithm uses are present
    /// and returns the resolved algorithm.
    pub fn resolve(&self) -> Result<Algorithm> {
        ensure!(self.k_cca >= 1, "k_cca must be at least 1");
        let present = [
            ("t1", self.t1),
            ("t2", self.t2),
            ("k_pc", self.k_pc),
            ("k_rpcca", self.k_rpcca),
        ];
        let needed: &[&str] = match self.algorithm {
            AlgoName::Exact => &[],
            AlgoName::Lcca => &["t1", "t2", "k_pc"],
            AlgoName::Dcca => &["t1"],
            AlgoName::Gcca => &["t1", "t2"],
            AlgoName::Rpcca => &["k_rpcca"],
        };
        let name = self.name();
        for (param, value) in present {
            match (needed.contains(&param), value) {
                (true, None) => bail!("{name} requires {param}"),
                (false, Some(_)) => bail!("{param} does not apply to {name}"),
                _ => {}
            }
        }
        if self.trace && matches!(self.algorithm, AlgoName::Exact | AlgoName::Rpcca) {
            bail!("{name} has no outer iterations to trace");
        }
        if let Some(t1) = self.t1 {
            ensure!(t1 >= 1, "t1 must be at least 1");
        }
        if let DataSource::Files {
            format,
            x_cols,
            y_cols,
            ..
        } = &self.data
        {
            match format {
                MatrixFormat::Libsvm => ensure!(
                    x_cols.is_some() && y_cols.is_some(),
                    "libsvm input needs x_cols and y_cols"
                ),
                MatrixFormat::Mtx => ensure!(
                    x_cols.is_none() && y_cols.is_none(),
                    "x_cols/y_cols only apply to libsvm input"
                ),
            }
        }
        let rsvd = RsvdParams::default();
        Ok(match self.algorithm {
            AlgoName::Exact => Algorithm::Exact { ridge: self.ridge },
            AlgoName::Lcca => Algorithm::Lcca {
                t1: self.t1.unwrap(),
                t2: self.t2.unwrap(),
                k_pc: self.k_pc.unwrap(),
                rsvd,
            },
            AlgoName::Dcca => Algorithm::Dcca {
                t1: self.t1.unwrap(),
            },
            AlgoName::Gcca => Algorithm::Gcca {
                t1: self.t1.unwrap(),
                t2: self.t2.unwrap(),
            },
            AlgoName::Rpcca => Algorithm::Rpcca {
                k_rpcca: self.k_rpcca.unwrap(),
                rsvd,
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self.algorithm {
            AlgoName::Exact => "exact",
            AlgoName::Lcca => "lcca",
            AlgoName::Dcca => "dcca",
            AlgoName::Gcca => "gcca",
            AlgoName::Rpcca => "rpcca",
        }
    }

    /// Copies the tuning parameters of `algorithm` back into the config.
    pub fn set_parameters(&mut self, algorithm: &Algorithm) {
        match *algorithm {
            Algorithm::Exact { ridge } => self.ridge = ridge,
            Algorithm::Lcca { t1, t2, k_pc, .. } => {
                (self.t1, self.t2, self.k_pc) = (Some(t1), Some(t2), Some(k_pc));
            }
            Algorithm::Dcca { t1 } => self.t1 = Some(t1),
            Algorithm::Gcca { t1, t2 } => (self.t1, self.t2) = (Some(t1), Some(t2)),
            Algorithm::Rpcca { k_rpcca, .. } => self.k_rpcca = Some(k_rpcca),
        }
    }
}
