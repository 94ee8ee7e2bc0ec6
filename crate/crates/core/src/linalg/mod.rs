//! Sparse and dense kernels shared by every algorithm in the crate.
//!
//! Dense blocks are column-major [`nalgebra::DMatrix`] values; the large data
//! matrices are row-compressed [`SparseMatrix`] values. Nothing here ever
//! materializes an `n x n` matrix.

mod dense;
mod qr;
mod sparse;

use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

pub use dense::{
    max_abs_diff, orthonormality_deviation, svd_desc, symmetric_eigen_desc, DescendingSvd,
};
pub use qr::{thin_qr, QrFactors, RANK_TOLERANCE};
pub use sparse::{gram_diagonal, sparse_dense_mul, sparse_transpose_dense_mul, SparseMatrix};

/// Tall-skinny dense block (iterates, bases, singular-vector blocks).
pub type DenseMatrix = nalgebra::DMatrix<f64>;

/// Machine-independent work meter.
///
/// Sparse multiply-adds are counted exactly (`nnz * columns` per product);
/// dense multiply-adds are counted for every product with a dimension of
/// order `n` or `p`, and `2 n k^2` per thin QR. Small `k x k` eigen and
/// singular value problems are not counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Work {
    pub sparse_products: u64,
    pub sparse_madds: u64,
    pub dense_madds: u64,
}

impl Work {
    pub fn sparse(&mut self, nnz: usize, cols: usize) {
        self.sparse_products += 1;
        self.sparse_madds += (nnz * cols) as u64;
    }

    /// `(m x inner) * (inner x cols)`
    pub fn dense(&mut self, m: usize, inner: usize, cols: usize) {
        self.dense_madds += (m * inner * cols) as u64;
    }

    pub fn qr(&mut self, rows: usize, cols: usize) {
        self.dense_madds += (2 * rows * cols * cols) as u64;
    }

    pub fn total(&self) -> u64 {
        self.sparse_madds + self.dense_madds
    }
}

impl AddAssign for Work {
    fn add_assign(&mut self, rhs: Self) {
        self.sparse_products += rhs.sparse_products;
        self.sparse_madds += rhs.sparse_madds;
        self.dense_madds += rhs.dense_madds;
    }
}
