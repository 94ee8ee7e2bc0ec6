use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{final_correlations, CcaResult, Diagnostics, SubspaceReference};
use crate::error::{Error, Result, Side};
use crate::linalg::{
    sparse_dense_mul, svd_desc, symmetric_eigen_desc, DenseMatrix, QrFactors, SparseMatrix, Work,
};

/// Eigenvalues of a Gram matrix at or below `FLOOR * trace / p` count as zero.
const WHITENING_FLOOR: f64 = 1e-10;
/// Ridge added to every eigenvalue when repair is enabled, relative to `trace / p`.
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactOptions {
    /// Add a small ridge to a singular Gram matrix instead of failing.
    pub ridge: bool,
}

/// Dense CCA by whitening and an SVD of the whitened cross-covariance.
#[derive(Debug, Clone)]
pub struct ExactCcaFactors {
    /// All `min(p1, p2)` canonical correlations, non-increasing.
    pub d: Vec<f64>,
    /// `p1 x k_cca`; `x * x_loadings` are the top canonical variables of `x`.
    pub x_loadings: DenseMatrix,
    /// `p2 x k_cca`.
    pub y_loadings: DenseMatrix,
    pub ridge_x: bool,
    pub ridge_y: bool,
    pub work: Work,
}

impl ExactCcaFactors {
    pub fn k_cca(&self) -> usize {
        self.x_loadings.ncols()
    }

    /// `(x * x_loadings, y * y_loadings)`.
    pub fn canonical_variables(
        &self,
        x: &SparseMatrix,
        y: &SparseMatrix,
    ) -> Result<(DenseMatrix, DenseMatrix)> {
        Ok((
            sparse_dense_mul(x, &self.x_loadings)?,
            sparse_dense_mul(y, &self.y_loadings)?,
        ))
    }

    /// Orthonormal bases of the top canonical subspaces.
    pub fn reference(&self, x: &SparseMatrix, y: &SparseMatrix) -> Result<SubspaceReference> {
        let (cx, cy) = self.canonical_variables(x, y)?;
        Ok(SubspaceReference {
            x: QrFactors::compute(&cx)?.q,
            y: QrFactors::compute(&cy)?.q,
        })
    }

    /// Sum of the top `k_cca` canonical correlations.
    pub fn top_sum(&self) -> f64 {
        self.d.iter().take(self.k_cca()).sum()
    }
}

pub fn exact_cca(
    x: &SparseMatrix,
    y: &SparseMatrix,
    k_cca: usize,
    options: ExactOptions,
) -> Result<ExactCcaFactors> {
    if x.n_rows() != y.n_rows() {
        return Err(Error::shape(
            "exact_cca",
            format!("x has {} rows, y has {}", x.n_rows(), y.n_rows()),
        ));
    }
    let (p1, p2) = (x.n_cols(), y.n_cols());
    if k_cca == 0 || k_cca > p1.min(p2) {
        return Err(Error::InvalidArgument(format!(
            "k_cca must lie in 1..={}, got {k_cca}",
            p1.min(p2)
        )));
    }
    let mut work = Work::default();
    let (wx, ridge_x) = inverse_sqrt(x.gram(), Side::X, options.ridge)?;
    let (wy, ridge_y) = inverse_sqrt(y.gram(), Side::Y, options.ridge)?;
    let cxy = x.cross_gram(y)?;
    work.sparse_madds += (x.gram_cost() + y.gram_cost()) as u64;
    work.sparse_madds += cross_gram_cost(x, y) as u64;
    work.dense(p1, p1, p2);
    work.dense(p1, p2, p2);

    let whitened = &wx * cxy * &wy;
    let svd = svd_desc(&whitened);
    let x_loadings = &wx * svd.u.columns(0, k_cca);
    let y_loadings = &wy * svd.v.columns(0, k_cca);
    work.dense(p1, p1, k_cca);
    work.dense(p2, p2, k_cca);
    Ok(ExactCcaFactors {
        d: svd.singular_values,
        x_loadings,
        y_loadings,
        ridge_x,
        ridge_y,
        work,
    })
}

fn cross_gram_cost(x: &SparseMatrix, y: &SparseMatrix) -> usize {
    (0..x.n_rows())
        .map(|i| x.row(i).0.len() * y.row(i).0.len())
        .sum()
}

/// `g^{-1/2}` by symmetric eigendecomposition; reports whether the ridge
/// was needed.
fn inverse_sqrt(g: DenseMatrix, side: Side, ridge: bool) -> Result<(DenseMatrix, bool)> {
    let p = g.nrows();
    let scale = g.trace() / p as f64;
    let floor = WHITENING_FLOOR * scale;
    let (mut values, vectors) = symmetric_eigen_desc(g);
    let min_eigenvalue = values.last().copied().unwrap_or(0.0);
    let singular = scale.is_nan() || scale <= 0.0 || min_eigenvalue <= floor;
    if singular && !(ridge && scale > 0.0) {
        return Err(Error::SingularGram {
            side,
            min_eigenvalue,
            floor,
        });
    }
    if singular {
        for v in &mut values {
            *v = v.max(0.0) + RIDGE * scale;
        }
    }
    let mut scaled = vectors.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col /= values[j].sqrt();
    }
    Ok((scaled * vectors.transpose(), singular))
}

/// Runs [`exact_cca`] and packages its canonical subspaces as a
/// [`CcaResult`].
pub(super) fn exact_result(
    x: &SparseMatrix,
    y: &SparseMatrix,
    k_cca: usize,
    options: ExactOptions,
    seed: u64,
) -> Result<CcaResult> {
    let start = Instant::now();
    let factors = exact_cca(x, y, k_cca, options)?;
    let (cx, cy) = factors.canonical_variables(x, y)?;
    let mut work = factors.work;
    work.sparse(x.nnz(), k_cca);
    work.sparse(y.nnz(), k_cca);
    let qx = QrFactors::compute(&cx)?;
    let qy = QrFactors::compute(&cy)?;
    work.qr(x.n_rows(), k_cca);
    work.qr(y.n_rows(), k_cca);
    let correlations = final_correlations(&qx.q, &qy.q)?;
    work.dense(k_cca, x.n_rows(), k_cca);
    Ok(CcaResult {
        correlations,
        trace: None,
        wall_time: start.elapsed().as_secs_f64(),
        work,
        seed,
        diagnostics: Diagnostics {
            rank_warning_x: qx.rank() < k_cca,
            rank_warning_y: qy.rank() < k_cca,
            ridge_x: factors.ridge_x,
            ridge_y: factors.ridge_y,
            ..Diagnostics::default()
        },
        x_basis: qx.q,
        y_basis: qy.q,
    })
}
