//! Least-squares projectors plugged into the iterative CCA loop.
//!
//! Each projector maps a right-hand side block `b` (`n x m`) to (an
//! approximation of) `H_X b = X (X^T X)^-1 X^T b`. The loop never needs
//! the coefficients, only the fitted values.

use crate::error::{Error, Result};
use crate::linalg::{
    gram_diagonal, sparse_dense_mul, sparse_transpose_dense_mul, symmetric_eigen_desc, DenseMatrix,
    QrFactors, SparseMatrix, Work,
};

pub trait LeastSquares: Sync {
    /// The design matrix whose column space is projected onto.
    fn design(&self) -> &SparseMatrix;

    /// Fitted values for every column of `rhs`, accounting work into `work`.
    fn project(&self, rhs: &DenseMatrix, work: &mut Work) -> Result<DenseMatrix>;

    /// Work one call to [`LeastSquares::project`] records for an `m`-column
    /// right-hand side.
    fn predicted_work(&self, m: usize) -> Work;
}

pub(crate) fn check_rows(design: &SparseMatrix, rhs: &DenseMatrix, op: &'static str) -> Result<()> {
    if design.n_rows() != rhs.nrows() {
        return Err(Error::Shape {
            op,
            detail: format!(
                "design has {} rows, right-hand side has {}",
                design.n_rows(),
                rhs.nrows()
            ),
        });
    }
    Ok(())
}

/// Exact orthogonal projection onto `span(X)`, for desk-scale reference
/// runs.
///
/// Builds an orthonormal basis of the column space once, from the
/// eigendecomposition of the dense Gram matrix with numerically null
/// directions discarded, so rank-deficient designs (e.g. indicator columns
/// that never fire) are handled as a pseudo-inverse.
#[derive(Debug, Clone)]
pub struct ExactProjector<'a> {
    x: &'a SparseMatrix,
    basis: DenseMatrix,
}

/// Eigenvalues of `X^T X` at or below this fraction of the largest are null.
const NULL_EIGEN_TOLERANCE: f64 = 1e-12;

impl<'a> ExactProjector<'a> {
    pub fn new(x: &'a SparseMatrix) -> Result<Self> {
        let (values, vectors) = symmetric_eigen_desc(x.gram());
        let top = values.first().copied().unwrap_or(0.0);
        let rank = values
            .iter()
            .take_while(|&&v| top > 0.0 && v > NULL_EIGEN_TOLERANCE * top)
            .count();
        if rank == 0 {
            return Ok(Self {
                x,
                basis: DenseMatrix::zeros(x.n_rows(), 0),
            });
        }
        let mut scaled = vectors.columns(0, rank).into_owned();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col /= values[j].sqrt();
        }
        // x v / sqrt(lambda) is orthonormal up to conditioning; one QR pass
        // restores orthonormality to working precision
        let raw = sparse_dense_mul(x, &scaled)?;
        let basis = QrFactors::compute(&raw)?.q;
        Ok(Self { x, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.basis
    }
}

impl LeastSquares for ExactProjector<'_> {
    fn design(&self) -> &SparseMatrix {
        self.x
    }

    fn project(&self, rhs: &DenseMatrix, work: &mut Work) -> Result<DenseMatrix> {
        check_rows(self.x, rhs, "exact projection")?;
        let coeffs = self.basis.tr_mul(rhs);
        let out = &self.basis * coeffs;
        let (n, r) = self.basis.shape();
        work.dense(r, n, rhs.ncols());
        work.dense(n, r, rhs.ncols());
        Ok(out)
    }

    fn predicted_work(&self, m: usize) -> Work {
        let (n, r) = self.basis.shape();
        let mut w = Work::default();
        w.dense(r, n, m);
        w.dense(n, r, m);
        w
    }
}

/// `X diag(X^T X)^-1 X^T b`: exact when the Gram matrix is diagonal, a
/// cheap approximation otherwise. Zero columns get a zero inverse.
#[derive(Debug, Clone)]
pub struct DiagonalProjector<'a> {
    x: &'a SparseMatrix,
    inverse_diag: Vec<f64>,
    zero_columns: usize,
}

impl<'a> DiagonalProjector<'a> {
    pub fn new(x: &'a SparseMatrix) -> Self {
        let diag = gram_diagonal(x);
        let zero_columns = diag.iter().filter(|&&d| d == 0.0).count();
        let inverse_diag = diag
            .into_iter()
            .map(|d| if d == 0.0 { 0.0 } else { 1.0 / d })
            .collect();
        Self {
            x,
            inverse_diag,
            zero_columns,
        }
    }

    /// Number of all-zero columns, whose inverse was taken as zero.
    pub fn zero_columns(&self) -> usize {
        self.zero_columns
    }
}

impl LeastSquares for DiagonalProjector<'_> {
    fn design(&self) -> &SparseMatrix {
        self.x
    }

    fn project(&self, rhs: &DenseMatrix, work: &mut Work) -> Result<DenseMatrix> {
        check_rows(self.x, rhs, "diagonal projection")?;
        let mut coeffs = sparse_transpose_dense_mul(self.x, rhs)?;
        work.sparse(self.x.nnz(), rhs.ncols());
        for mut col in coeffs.column_iter_mut() {
            for (c, &inv) in col.iter_mut().zip(&self.inverse_diag) {
                *c *= inv;
            }
        }
        let out = sparse_dense_mul(self.x, &coeffs)?;
        work.sparse(self.x.nnz(), rhs.ncols());
        Ok(out)
    }

    fn predicted_work(&self, m: usize) -> Work {
        let mut w = Work::default();
        w.sparse(self.x.nnz(), m);
        w.sparse(self.x.nnz(), m);
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    #[test]
    fn exact_projection_of_column_space_vector_is_identity() {
        let x = SparseMatrix::from_triplets(
            4,
            2,
            vec![
                (0, 0, 1.0),
                (1, 0, 2.0),
                (2, 1, 1.0),
                (3, 1, -1.0),
                (3, 0, 0.5),
            ],
        )
        .unwrap();
        let proj = ExactProjector::new(&x).unwrap();
        assert_eq!(proj.rank(), 2);
        let coeffs = DenseMatrix::from_column_slice(2, 1, &[0.3, -1.2]);
        let b = sparse_dense_mul(&x, &coeffs).unwrap();
        let mut work = Work::default();
        let out = proj.project(&b, &mut work).unwrap();
        assert!(max_abs_diff(&out, &b) < 1e-14);
        assert_eq!(work, proj.predicted_work(1));
    }

    #[test]
    fn exact_projector_handles_zero_columns() {
        let x =
            SparseMatrix::from_triplets(3, 3, vec![(0, 0, 1.0), (1, 0, 1.0), (2, 1, 1.0)]).unwrap();
        let proj = ExactProjector::new(&x).unwrap();
        assert_eq!(proj.rank(), 2);
        let b = DenseMatrix::from_column_slice(3, 1, &[1.0, 0.0, 5.0]);
        let out = proj.project(&b, &mut Work::default()).unwrap();
        assert!(
            max_abs_diff(
                &out,
                &DenseMatrix::from_column_slice(3, 1, &[0.5, 0.5, 5.0])
            ) < 1e-14
        );
    }

    #[test]
    fn diagonal_projector_is_exact_for_indicators() {
        let x = SparseMatrix::from_triplets(
            4,
            3,
            vec![(0, 0, 1.0), (1, 1, 1.0), (2, 0, 1.0), (3, 1, 1.0)],
        )
        .unwrap();
        let diag = DiagonalProjector::new(&x);
        assert_eq!(diag.zero_columns(), 1);
        let exact = ExactProjector::new(&x).unwrap();
        let b = DenseMatrix::from_column_slice(4, 2, &[1.0, 2.0, 3.0, 4.0, -1.0, 0.0, 2.0, 7.0]);
        let a = diag.project(&b, &mut Work::default()).unwrap();
        let e = exact.project(&b, &mut Work::default()).unwrap();
        assert!(max_abs_diff(&a, &e) < 1e-14);
    }

    #[test]
    fn row_mismatch_is_rejected() {
        let x = SparseMatrix::identity(3);
        let b = DenseMatrix::zeros(2, 1);
        assert!(DiagonalProjector::new(&x)
            .project(&b, &mut Work::default())
            .is_err());
    }
}
