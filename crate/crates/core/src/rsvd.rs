//! Randomized range finder for the top left singular subspace of a sparse
//! matrix.
//!
//! A Gaussian sketch of width `k + oversample` is pushed through
//! `power_iters` rounds of `a (a^T .)`, re-orthonormalizing after every
//! product. A Rayleigh-Ritz step on the final basis orders directions by
//! estimated singular value and truncates to `k`.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    sparse_dense_mul, sparse_transpose_dense_mul, svd_desc, DenseMatrix, QrFactors, SparseMatrix,
    Work, RANK_TOLERANCE,
};
use crate::random::{self, gaussian_matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsvdParams {
    pub power_iters: usize,
    pub oversample: usize,
}

impl Default for RsvdParams {
    fn default() -> Self {
        Self {
            power_iters: 2,
            oversample: 10,
        }
    }
}

/// Orthonormal estimate of the top left singular vectors.
#[derive(Debug, Clone)]
pub struct RangeBasis {
    /// `n x min(k, rank)` with orthonormal columns, ordered by decreasing
    /// singular value estimate.
    pub u1: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub requested: usize,
    /// Set when the matrix has fewer than `requested` numerically nonzero
    /// singular values; `u1` is truncated to the detected rank.
    pub rank_deficient: bool,
    pub seed: u64,
    pub params: RsvdParams,
    pub work: Work,
}

impl RangeBasis {
    pub fn k_pc(&self) -> usize {
        self.u1.ncols()
    }
}

/// Top-`k` left singular vectors of `a`, deterministic in `seed`.
pub fn randomized_top_singulars(
    a: &SparseMatrix,
    k: usize,
    params: RsvdParams,
    seed: u64,
) -> Result<RangeBasis> {
    let mut rng = random::rng(seed, random::stream::START);
    range_basis_with(a, k, params, &mut rng, seed)
}

fn range_basis_with(
    a: &SparseMatrix,
    k: usize,
    params: RsvdParams,
    rng: &mut ChaCha8Rng,
    seed: u64,
) -> Result<RangeBasis> {
    let (n, p) = a.shape();
    if k == 0 || k > n.min(p) {
        return Err(Error::InvalidArgument(format!(
            "randomized SVD needs 1 <= k <= min(n, p) = {}, got k = {k}",
            n.min(p)
        )));
    }
    let width = (k + params.oversample).min(n.min(p));
    let nnz = a.nnz();
    let mut work = Work::default();

    let sketch = gaussian_matrix(rng, p, width);
    let mut q = QrFactors::compute(&sparse_dense_mul(a, &sketch)?)?.q;
    work.sparse(nnz, width);
    work.qr(n, width);

    for _ in 0..params.power_iters {
        let z = QrFactors::compute(&sparse_transpose_dense_mul(a, &q)?)?.q;
        work.sparse(nnz, width);
        work.qr(p, width);
        q = QrFactors::compute(&sparse_dense_mul(a, &z)?)?.q;
        work.sparse(nnz, width);
        work.qr(n, width);
    }

    // q^T a = r_b^T q_b^T, so the left singular vectors of q^T a are those of
    // the small r_b^T
    let bt = sparse_transpose_dense_mul(a, &q)?;
    work.sparse(nnz, width);
    let fb = QrFactors::compute(&bt)?;
    work.qr(p, width);
    let small = svd_desc(&fb.r.transpose());

    let top = small.singular_values.first().copied().unwrap_or(0.0);
    let rank = small
        .singular_values
        .iter()
        .take_while(|&&s| top > 0.0 && s > RANK_TOLERANCE * top)
        .count();
    let keep = k.min(rank);
    let w = small.u.columns(0, keep).into_owned();
    let u1 = &q * w;
    work.dense(n, width, keep);

    Ok(RangeBasis {
        u1,
        singular_values: small.singular_values[..keep].to_vec(),
        requested: k,
        rank_deficient: keep < k,
        seed,
        params,
        work,
    })
}

/// Work [`randomized_top_singulars`] records on a full-rank input.
pub fn predicted_work(nnz: usize, n: usize, p: usize, k: usize, params: RsvdParams) -> Work {
    let width = (k + params.oversample).min(n.min(p));
    let rounds = 1 + params.power_iters;
    let mut w = Work::default();
    for _ in 0..rounds {
        w.sparse(nnz, width);
        w.qr(n, width);
    }
    for _ in 0..params.power_iters {
        w.sparse(nnz, width);
        w.qr(p, width);
    }
    w.sparse(nnz, width);
    w.qr(p, width);
    w.dense(n, width, k);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormality_deviation;

    #[test]
    fn rank_one_matrix_recovers_left_vector() {
        let u = [0.6, 0.0, 0.8];
        let v = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        let mut t = Vec::new();
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                t.push((i, j, ui * vj * 3.0));
            }
        }
        let a = SparseMatrix::from_triplets(3, 2, t).unwrap();
        let basis = randomized_top_singulars(&a, 1, RsvdParams::default(), 1).unwrap();
        let dot: f64 = (0..3).map(|i| basis.u1[(i, 0)] * u[i]).sum();
        assert!((dot.abs() - 1.0).abs() < 1e-12);
        assert!((basis.singular_values[0] - 3.0).abs() < 1e-12);
        assert!(!basis.rank_deficient);
    }

    #[test]
    fn rank_deficiency_truncates_and_flags() {
        let a = SparseMatrix::from_triplets(4, 3, vec![(0, 0, 2.0), (1, 1, 1.0)]).unwrap();
        let basis = randomized_top_singulars(&a, 3, RsvdParams::default(), 5).unwrap();
        assert!(basis.rank_deficient);
        assert_eq!(basis.k_pc(), 2);
        assert!(orthonormality_deviation(&basis.u1) < 1e-12);
        assert_eq!(basis.requested, 3);
    }

    #[test]
    fn invalid_k_is_rejected() {
        let a = SparseMatrix::identity(3);
        assert!(randomized_top_singulars(&a, 0, RsvdParams::default(), 0).is_err());
        assert!(randomized_top_singulars(&a, 4, RsvdParams::default(), 0).is_err());
    }

    #[test]
    fn work_matches_prediction() {
        let a = SparseMatrix::from_triplets(
            6,
            5,
            (0..6).flat_map(|i| (0..5).map(move |j| (i, j, 1.0 + (i * 5 + j) as f64))),
        )
        .unwrap();
        let params = RsvdParams {
            power_iters: 3,
            oversample: 1,
        };
        let basis = randomized_top_singulars(&a, 2, params, 9).unwrap();
        assert_eq!(basis.work, predicted_work(a.nnz(), 6, 5, 2, params));
    }
}
