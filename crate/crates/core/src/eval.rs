//! Subspace distance, convergence-rate fitting and the captured-correlation
//! metric.

use serde::{Deserialize, Serialize};

use crate::cca::CcaResult;
use crate::error::{Error, Result};
use crate::linalg::{svd_desc, thin_qr, DenseMatrix, QrFactors};

/// `||H_W - H_Z||_2` for two `n x k` full-column-rank blocks.
///
/// Computed as the largest singular value of `(I - Q_W Q_W^T) Q_Z`, the sine
/// of the largest principal angle. This equals `sqrt(1 - s_min(Q_W^T Q_Z)^2)`
/// but keeps full relative accuracy for nearly equal subspaces.
pub fn subspace_dist(w: &DenseMatrix, z: &DenseMatrix) -> Result<f64> {
    if w.shape() != z.shape() {
        return Err(Error::shape(
            "subspace_dist",
            format!("{:?} vs {:?}", w.shape(), z.shape()),
        ));
    }
    let qw = thin_qr(w)?.q;
    let qz = thin_qr(z)?.q;
    let residual = &qz - &qw * qw.tr_mul(&qz);
    let r = QrFactors::compute(&residual)?.r;
    let top = svd_desc(&r).singular_values[0];
    Ok(top.clamp(0.0, 1.0))
}

/// Geometric decay rate fitted to the tail of an error sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub log_errors: Vec<f64>,
    /// Index of the first point used in the fit.
    pub tail_start: usize,
    /// `exp(slope)` of the least-squares line through the tail of
    /// `log_errors`.
    pub ratio: f64,
    pub theoretical: Option<f64>,
    pub margin: Option<f64>,
}

impl RateFit {
    pub fn with_bound(mut self, theoretical: f64, margin: f64) -> Self {
        self.theoretical = Some(theoretical);
        self.margin = Some(margin);
        self
    }

    /// `ratio <= theoretical + margin`, when a bound is attached.
    pub fn within_bound(&self) -> Option<bool> {
        Some(self.ratio <= self.theoretical? + self.margin?)
    }
}

/// Fits `errors[t] ~ C ratio^t` over the last `tail_fraction` of the
/// sequence. Needs at least 4 tail points, all strictly positive.
pub fn fit_geometric_rate(errors: &[f64], tail_fraction: f64) -> Result<RateFit> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail fraction must lie in (0, 1], got {tail_fraction}"
        )));
    }
    if let Some(bad) = errors.iter().position(|e| !e.is_finite() || *e <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "error sequence entry {bad} is not a positive finite number ({}); floor converged values first",
            errors[bad]
        )));
    }
    let len = errors.len();
    let tail = ((len as f64) * tail_fraction).ceil() as usize;
    if tail < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 tail points, got {tail} from {len} errors"
        )));
    }
    let tail_start = len - tail;
    let log_errors: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let xs: Vec<f64> = (tail_start..len).map(|t| t as f64).collect();
    let ys = &log_errors[tail_start..];
    let x_mean = xs.iter().sum::<f64>() / tail as f64;
    let y_mean = ys.iter().sum::<f64>() / tail as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    Ok(RateFit {
        ratio: (sxy / sxx).exp(),
        log_errors,
        tail_start,
        theoretical: None,
        margin: None,
    })
}

/// Sum of the final canonical correlations of a run.
pub fn captured_correlation_sum(result: &CcaResult) -> f64 {
    result.correlations.iter().sum()
}
