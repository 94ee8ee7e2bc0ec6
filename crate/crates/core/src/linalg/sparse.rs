use rayon::prelude::*;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Rows handled per parallel task in `a * b`.
const ROW_BLOCK: usize = 256;

/// Upper bound on the number of partial accumulators in `a^T * b`. The
/// partition depends only on the matrix, never on the thread count, so the
/// summation order (and therefore every bit of the result) is fixed.
const MAX_PARTITIONS: usize = 8;
const NNZ_PER_PARTITION: usize = 1 << 16;

/// Immutable row-compressed sparse matrix.
///
/// Column indices within a row are strictly increasing and no explicit
/// zeros are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Validates raw compressed-row storage.
    pub fn try_from_csr(
        n_rows: usize,
        n_cols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if indptr.len() != n_rows + 1 {
            return Err(Error::InvalidSparse(format!(
                "offsets have length {}, expected {}",
                indptr.len(),
                n_rows + 1
            )));
        }
        if indptr[0] != 0 || indptr[n_rows] != indices.len() || indices.len() != values.len() {
            return Err(Error::InvalidSparse(
                "offsets must start at 0 and end at nnz; indices and values must match".into(),
            ));
        }
        for i in 0..n_rows {
            let (lo, hi) = (indptr[i], indptr[i + 1]);
            if lo > hi {
                return Err(Error::InvalidSparse(format!("offsets decrease at row {i}")));
            }
            let row = &indices[lo..hi];
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidSparse(format!(
                    "column indices of row {i} are not strictly increasing"
                )));
            }
            if let Some(&last) = row.last() {
                if last >= n_cols {
                    return Err(Error::InvalidSparse(format!(
                        "column index {last} out of bounds in row {i} (n_cols = {n_cols})"
                    )));
                }
            }
        }
        if let Some(pos) = values.iter().position(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidSparse(format!(
                "stored value at position {pos} is zero or not finite"
            )));
        }
        Ok(Self {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        })
    }

    /// Builds a matrix from coordinate entries. Duplicates are summed and
    /// entries that end up exactly zero are dropped.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(i, j, v) in &entries {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidSparse(format!(
                    "entry ({i}, {j}) out of bounds for {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidSparse(format!(
                    "entry ({i}, {j}) is not finite"
                )));
            }
        }
        // stable sort keeps duplicate summation order deterministic
        entries.sort_by_key(|&(i, j, _)| (i, j));

        let mut indptr = vec![0usize; n_rows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((i, j, mut v)) = iter.next() {
            while let Some(&(i2, j2, v2)) = iter.peek() {
                if (i2, j2) != (i, j) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != 0.0 {
                indices.push(j);
                values.push(v);
                indptr[i + 1] += 1;
            }
        }
        for i in 0..n_rows {
            indptr[i + 1] += indptr[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            indptr: vec![0; n_rows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let (n, p) = m.shape();
        let triplets = (0..n).flat_map(|i| (0..p).map(move |j| (i, j, m[(i, j)])));
        Self::from_triplets(n, p, triplets.filter(|t| t.2 != 0.0))
            .expect("dense entries are in bounds")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.indptr[i], self.indptr[i + 1]);
        (&self.indices[lo..hi], &self.values[lo..hi])
    }

    /// Iterates stored entries as `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            out[(i, j)] = v;
        }
        out
    }

    /// Dense `a^T a`, accumulated row by row from the nonzero pattern.
    pub fn gram(&self) -> DenseMatrix {
        let p = self.n_cols;
        let mut g = DenseMatrix::zeros(p, p);
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (a, (&j1, &v1)) in cols.iter().zip(vals).enumerate() {
                for (&j2, &v2) in cols[a..].iter().zip(&vals[a..]) {
                    g[(j1, j2)] += v1 * v2;
                }
            }
        }
        for j in 0..p {
            for i in (j + 1)..p {
                g[(i, j)] = g[(j, i)];
            }
        }
        g
    }

    /// Dense `a^T b` for two matrices with the same rows.
    pub fn cross_gram(&self, other: &SparseMatrix) -> Result<DenseMatrix> {
        if self.n_rows != other.n_rows {
            return Err(Error::shape(
                "cross_gram",
                format!("{} rows vs {} rows", self.n_rows, other.n_rows),
            ));
        }
        let mut g = DenseMatrix::zeros(self.n_cols, other.n_cols);
        for i in 0..self.n_rows {
            let (ca, va) = self.row(i);
            let (cb, vb) = other.row(i);
            for (&j1, &v1) in ca.iter().zip(va) {
                for (&j2, &v2) in cb.iter().zip(vb) {
                    g[(j1, j2)] += v1 * v2;
                }
            }
        }
        Ok(g)
    }

    /// Sum of squared entries in a row-major pass; the flop count of
    /// [`SparseMatrix::gram`].
    pub fn gram_cost(&self) -> usize {
        (0..self.n_rows)
            .map(|i| {
                let c = self.indptr[i + 1] - self.indptr[i];
                c * (c + 1) / 2
            })
            .sum()
    }
}

/// `a * b` for sparse `a` (`n x p`) and dense `b` (`p x k`).
pub fn sparse_dense_mul(a: &SparseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.n_cols != b.nrows() {
        return Err(Error::shape(
            "sparse_dense_mul",
            format!(
                "{}x{} times {}x{}",
                a.n_rows,
                a.n_cols,
                b.nrows(),
                b.ncols()
            ),
        ));
    }
    let (n, k) = (a.n_rows, b.ncols());
    if k == 0 || n == 0 {
        return Ok(DenseMatrix::zeros(n, k));
    }
    // row j of b becomes a contiguous slice
    let bt = b.transpose();
    let bt = bt.as_slice();
    let mut out = vec![0.0; n * k];
    out.par_chunks_mut(k * ROW_BLOCK)
        .enumerate()
        .for_each(|(block, chunk)| {
            for (r, out_row) in chunk.chunks_mut(k).enumerate() {
                let (cols, vals) = a.row(block * ROW_BLOCK + r);
                for (&j, &v) in cols.iter().zip(vals) {
                    let b_row = &bt[j * k..(j + 1) * k];
                    for (o, &bv) in out_row.iter_mut().zip(b_row) {
                        *o += v * bv;
                    }
                }
            }
        });
    Ok(DenseMatrix::from_row_slice(n, k, &out))
}

/// `a^T * b` for sparse `a` (`n x p`) and dense `b` (`n x k`), without
/// materializing the transpose.
pub fn sparse_transpose_dense_mul(a: &SparseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.n_rows != b.nrows() {
        return Err(Error::shape(
            "sparse_transpose_dense_mul",
            format!(
                "({}x{})^T times {}x{}",
                a.n_rows,
                a.n_cols,
                b.nrows(),
                b.ncols()
            ),
        ));
    }
    let (n, p, k) = (a.n_rows, a.n_cols, b.ncols());
    if k == 0 || p == 0 {
        return Ok(DenseMatrix::zeros(p, k));
    }
    let bt = b.transpose();
    let bt = bt.as_slice();

    let parts = (a.nnz() / NNZ_PER_PARTITION)
        .clamp(1, MAX_PARTITIONS)
        .min(n.max(1));
    let rows_per = n.div_ceil(parts).max(1);
    let partials: Vec<Vec<f64>> = (0..parts)
        .into_par_iter()
        .map(|part| {
            let mut acc = vec![0.0; p * k];
            let lo = part * rows_per;
            let hi = ((part + 1) * rows_per).min(n);
            for i in lo..hi {
                let (cols, vals) = a.row(i);
                let b_row = &bt[i * k..(i + 1) * k];
                for (&j, &v) in cols.iter().zip(vals) {
                    for (o, &bv) in acc[j * k..(j + 1) * k].iter_mut().zip(b_row) {
                        *o += v * bv;
                    }
                }
            }
            acc
        })
        .collect();

    let mut iter = partials.into_iter();
    let mut acc = iter.next().unwrap_or_else(|| vec![0.0; p * k]);
    for partial in iter {
        for (o, v) in acc.iter_mut().zip(partial) {
            *o += v;
        }
    }
    Ok(DenseMatrix::from_row_slice(p, k, &acc))
}

/// Squared column norms, i.e. the diagonal of `a^T a`.
pub fn gram_diagonal(a: &SparseMatrix) -> Vec<f64> {
    let mut diag = vec![0.0; a.n_cols];
    for (&j, &v) in a.indices.iter().zip(&a.values) {
        diag[j] += v * v;
    }
    diag
}
