//! Canonical correlation analysis: the exact small-scale oracle, the
//! generic iterative least-squares orthogonal iteration, and the four fast
//! schemes built on it.

mod exact;
mod iterative;
mod schemes;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{orthonormality_deviation, svd_desc, DenseMatrix, Work};

pub use exact::{exact_cca, ExactCcaFactors, ExactOptions};
pub use iterative::iterative_ls_cca;
pub use schemes::{d_cca, g_cca, l_cca, rp_cca, Algorithm};

/// Orthonormal bases of the two returned canonical subspaces.
#[derive(Debug, Clone)]
pub struct CcaResult {
    /// `n x k_cca`, orthonormal columns.
    pub x_basis: DenseMatrix,
    /// `n x k_cca`, orthonormal columns.
    pub y_basis: DenseMatrix,
    /// Canonical correlations between the two bases, non-increasing.
    pub correlations: Vec<f64>,
    pub trace: Option<ConvergenceTrace>,
    pub wall_time: f64,
    pub work: Work,
    pub seed: u64,
    pub diagnostics: Diagnostics,
}

/// Non-fatal events observed during a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Times an iterate lost rank and had columns replaced.
    pub repairs: usize,
    pub zero_columns_x: usize,
    pub zero_columns_y: usize,
    pub rank_warning_x: bool,
    pub rank_warning_y: bool,
    pub ridge_x: bool,
    pub ridge_y: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub dist_x: Option<f64>,
    pub dist_y: Option<f64>,
    pub correlation_sum: f64,
    /// Seconds since the start of the run.
    pub seconds: f64,
    /// Cumulative [`Work::total`].
    pub work: u64,
    pub repairs: usize,
}

/// One record per completed outer iteration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn dist_x(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.dist_x).collect()
    }

    pub fn dist_y(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.dist_y).collect()
    }
}

/// Target subspaces that iterations are measured against.
#[derive(Debug, Clone)]
pub struct SubspaceReference {
    pub x: DenseMatrix,
    pub y: DenseMatrix,
}

/// Bases handed to [`final_correlations`] must be orthonormal to this level.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-6;

/// Canonical correlations between two orthonormal blocks: the singular
/// values of `x_basis^T y_basis`, clamped to `[0, 1]`, non-increasing.
pub fn final_correlations(x_basis: &DenseMatrix, y_basis: &DenseMatrix) -> Result<Vec<f64>> {
    if x_basis.nrows() != y_basis.nrows() {
        return Err(Error::shape(
            "final_correlations",
            format!("{} rows vs {} rows", x_basis.nrows(), y_basis.nrows()),
        ));
    }
    for b in [x_basis, y_basis] {
        let deviation = orthonormality_deviation(b);
        if deviation > ORTHONORMAL_TOLERANCE {
            return Err(Error::NotOrthonormal { deviation });
        }
    }
    let svd = svd_desc(&x_basis.tr_mul(y_basis));
    Ok(svd
        .singular_values
        .into_iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect())
}
