use anyhow::{Context, Result};
use lcca_core::ingest::{read_libsvm, read_matrix_market, synth_correlated, tokens_to_indicators};
use lcca_core::SparseMatrix;

use crate::config::{DataSource, MatrixFormat};

/// The two views of a dataset.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: SparseMatrix,
    pub y: SparseMatrix,
}

pub fn load(source: &DataSource) -> Result<Dataset> {
    let (x, y) = match source {
        DataSource::Files {
            x,
            y,
            format: MatrixFormat::Mtx,
            ..
        } => (read_matrix_market(x)?, read_matrix_market(y)?),
        DataSource::Files {
            x,
            y,
            format: MatrixFormat::Libsvm,
            x_cols,
            y_cols,
        } => {
            let x_cols = x_cols.context("libsvm input needs x_cols")?;
            let y_cols = y_cols.context("libsvm input needs y_cols")?;
            (read_libsvm(x, x_cols)?, read_libsvm(y, y_cols)?)
        }
        DataSource::Synth(spec) => {
            let inst = synth_correlated(spec)?;
            (inst.x, inst.y)
        }
        DataSource::Tokens(spec) => {
            let out = tokens_to_indicators(spec)?;
            (out.x, out.y)
        }
    };
    anyhow::ensure!(
        x.n_rows() == y.n_rows(),
        "views have different row counts: x {} vs y {}",
        x.n_rows(),
        y.n_rows()
    );
    Ok(Dataset { x, y })
}
