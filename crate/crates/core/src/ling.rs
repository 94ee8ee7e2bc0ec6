//! LING: fast approximate projection onto the column space of a sparse
//! design.
//!
//! The projection `H_X y` is split into the part along the top `k_pc` left
//! singular vectors `U1` of `X`, computed exactly as `U1 U1^T y`, and the
//! remainder, approximated by `t2` steps of steepest descent on the deflated
//! least-squares problem `min ||X b - (y - U1 U1^T y)||^2` started at zero.
//!
//! Each descent step uses the exact line search `||g||^2 / ||X g||^2`, whose
//! error contracts by at least `((s_{k+1}^2 - s_p^2) / (s_{k+1}^2 + s_p^2))^2`
//! per step once the top `k_pc` directions are removed.
//!
//! In exact arithmetic every step image `X g` is orthogonal to `U1`. In
//! floating point it is not, and the step length, tuned to the small
//! remaining singular values, multiplies the stray `U1` part by roughly
//! `s_1^2 / s_{k+1}^2` per step. The descent therefore projects each image
//! off `U1`, at `4 n k_pc` extra multiply-adds per column and step.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{
    sparse_dense_mul, sparse_transpose_dense_mul, DenseMatrix, SparseMatrix, Work,
};
use crate::projector::{check_rows, LeastSquares};
use crate::rsvd::{randomized_top_singulars, RangeBasis, RsvdParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LingConfig {
    /// Number of top left singular vectors projected exactly; 0 gives plain
    /// gradient descent.
    pub k_pc: usize,
    /// Gradient iterations; 0 keeps only the projection onto `U1`.
    pub t2: usize,
    pub rsvd: RsvdParams,
    pub seed: u64,
}

impl LingConfig {
    pub fn new(k_pc: usize, t2: usize, seed: u64) -> Self {
        Self {
            k_pc,
            t2,
            rsvd: RsvdParams::default(),
            seed,
        }
    }
}

/// A design matrix with its deflation basis, reusable for any number of
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct LingSolver<'a> {
    x: &'a SparseMatrix,
    basis: Option<RangeBasis>,
    config: LingConfig,
}

impl<'a> LingSolver<'a> {
    /// Computes `U1` once. A `k_pc` above `min(n, p)` is clamped; a rank
    /// below `k_pc` shows up as [`LingSolver::rank_warning`].
    pub fn build(x: &'a SparseMatrix, config: LingConfig) -> Result<Self> {
        let k = config.k_pc.min(x.n_rows().min(x.n_cols()));
        let basis = if k == 0 {
            None
        } else {
            Some(randomized_top_singulars(x, k, config.rsvd, config.seed)?)
        };
        Ok(Self { x, basis, config })
    }

    pub fn basis(&self) -> Option<&RangeBasis> {
        self.basis.as_ref()
    }

    pub fn config(&self) -> &LingConfig {
        &self.config
    }

    pub fn rank_warning(&self) -> bool {
        self.basis.as_ref().is_some_and(|b| b.rank_deficient)
    }

    /// Work spent building the basis.
    pub fn setup_work(&self) -> Work {
        self.basis.as_ref().map(|b| b.work).unwrap_or_default()
    }

    pub fn solve(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        self.project(y, &mut Work::default())
    }

    /// Like [`LingSolver::solve`], calling `observe(t, fitted)` with the
    /// full approximation after 0, 1, ..., `t2` gradient steps.
    pub fn solve_observed(
        &self,
        y: &DenseMatrix,
        work: &mut Work,
        mut observe: impl FnMut(usize, &DenseMatrix),
    ) -> Result<DenseMatrix> {
        check_rows(self.x, y, "ling_solve")?;
        let deflated = self.deflate(y, work);
        match deflated {
            Some((top, residual)) => {
                let u1 = self.basis.as_ref().map(|b| &b.u1);
                let fit = descend(self.x, &residual, self.config.t2, u1, work, |t, fit| {
                    observe(t, &(&top + fit))
                })?;
                Ok(top + fit)
            }
            None => descend(self.x, y, self.config.t2, None, work, observe),
        }
    }

    /// `(U1 U1^T y, y - U1 U1^T y)`, or `None` without a basis.
    fn deflate(&self, y: &DenseMatrix, work: &mut Work) -> Option<(DenseMatrix, DenseMatrix)> {
        let u1 = &self.basis.as_ref()?.u1;
        let (n, k) = u1.shape();
        let top = u1 * u1.tr_mul(y);
        work.dense(k, n, y.ncols());
        work.dense(n, k, y.ncols());
        let residual = y - &top;
        Some((top, residual))
    }
}

impl LeastSquares for LingSolver<'_> {
    fn design(&self) -> &SparseMatrix {
        self.x
    }

    fn project(&self, rhs: &DenseMatrix, work: &mut Work) -> Result<DenseMatrix> {
        self.solve_observed(rhs, work, |_, _| {})
    }

    fn predicted_work(&self, m: usize) -> Work {
        let k = self.basis.as_ref().map_or(0, RangeBasis::k_pc);
        solve_work(self.x, k, self.config.t2, m)
    }
}

/// Work of one LING solve for `m` right-hand sides given a basis of `k`
/// columns, excluding the basis itself.
pub fn solve_work(x: &SparseMatrix, k: usize, t2: usize, m: usize) -> Work {
    let n = x.n_rows();
    let mut w = Work::default();
    if k > 0 {
        w.dense(k, n, m);
        w.dense(n, k, m);
    }
    for _ in 0..t2 {
        w.sparse(x.nnz(), m);
        w.sparse(x.nnz(), m);
        if k > 0 {
            w.dense(k, n, m);
            w.dense(n, k, m);
        }
    }
    w
}

/// Fitted values `x b_t2` after `t2` exact-line-search steepest descent
/// steps on `||x b - y_r||^2` from `b = 0`, each column independently.
pub fn gd_least_squares(x: &SparseMatrix, y_r: &DenseMatrix, t2: usize) -> Result<DenseMatrix> {
    check_rows(x, y_r, "gd_least_squares")?;
    descend(x, y_r, t2, None, &mut Work::default(), |_, _| {})
}

/// [`gd_least_squares`] reporting the fit after every step (including the
/// zero fit at step 0).
pub fn gd_least_squares_observed(
    x: &SparseMatrix,
    y_r: &DenseMatrix,
    t2: usize,
    work: &mut Work,
    observe: impl FnMut(usize, &DenseMatrix),
) -> Result<DenseMatrix> {
    check_rows(x, y_r, "gd_least_squares")?;
    descend(x, y_r, t2, None, work, observe)
}

/// Steepest descent from zero; with `keep_out`, every step image is
/// projected onto the orthogonal complement of its columns.
fn descend(
    x: &SparseMatrix,
    target: &DenseMatrix,
    steps: usize,
    keep_out: Option<&DenseMatrix>,
    work: &mut Work,
    mut observe: impl FnMut(usize, &DenseMatrix),
) -> Result<DenseMatrix> {
    let mut fit = DenseMatrix::zeros(target.nrows(), target.ncols());
    observe(0, &fit);
    for t in 1..=steps {
        let residual = &fit - target;
        let grad = sparse_transpose_dense_mul(x, &residual)?;
        work.sparse(x.nnz(), target.ncols());
        let mut image = sparse_dense_mul(x, &grad)?;
        work.sparse(x.nnz(), target.ncols());
        if let Some(u) = keep_out {
            let (n, k) = u.shape();
            image -= u * u.tr_mul(&image);
            work.dense(k, n, target.ncols());
            work.dense(n, k, target.ncols());
        }
        for c in 0..target.ncols() {
            let gg = grad.column(c).norm_squared();
            let hh = image.column(c).norm_squared();
            // a zero image means the gradient is already zero on span(x)
            if hh > 0.0 && gg > 0.0 {
                fit.column_mut(c).axpy(-gg / hh, &image.column(c), 1.0);
            }
        }
        observe(t, &fit);
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, orthonormality_deviation};

    fn design() -> SparseMatrix {
        SparseMatrix::from_triplets(
            6,
            3,
            vec![
                (0, 0, 2.0),
                (1, 0, 1.0),
                (1, 1, 3.0),
                (2, 2, 0.5),
                (3, 1, -1.0),
                (4, 0, 1.0),
                (4, 2, 2.0),
                (5, 1, 0.25),
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs_gives_zero_fit() {
        let x = design();
        let y = DenseMatrix::zeros(6, 2);
        for t2 in [0, 1, 7] {
            assert_eq!(gd_least_squares(&x, &y, t2).unwrap(), y);
        }
    }

    #[test]
    fn zero_iterations_give_zero_fit() {
        let x = design();
        let y = DenseMatrix::from_element(6, 1, 1.0);
        assert_eq!(
            gd_least_squares(&x, &y, 0).unwrap(),
            DenseMatrix::zeros(6, 1)
        );
    }

    #[test]
    fn orthonormal_design_converges_in_one_step() {
        let x =
            SparseMatrix::from_triplets(4, 2, vec![(0, 0, 0.6), (1, 0, 0.8), (2, 1, 1.0)]).unwrap();
        let y = DenseMatrix::from_column_slice(4, 2, &[1.0, -2.0, 3.0, 4.0, 0.5, 0.5, 0.5, 0.5]);
        let xd = x.to_dense();
        let exact = &xd * (xd.transpose() * &y);
        let fit = gd_least_squares(&x, &y, 1).unwrap();
        assert!(max_abs_diff(&fit, &exact) < 1e-12);
    }

    #[test]
    fn objective_never_increases() {
        let x = design();
        let y = DenseMatrix::from_column_slice(6, 1, &[1.0, 0.0, -1.0, 2.0, 0.5, 3.0]);
        let mut objectives = Vec::new();
        gd_least_squares_observed(&x, &y, 25, &mut Work::default(), |_, fit| {
            objectives.push((fit - &y).norm_squared());
        })
        .unwrap();
        assert_eq!(objectives.len(), 26);
        assert!(objectives.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-14)));
    }

    #[test]
    fn zero_k_pc_builds_no_basis() {
        let x = design();
        let solver = LingSolver::build(&x, LingConfig::new(0, 3, 1)).unwrap();
        assert!(solver.basis().is_none());
        assert_eq!(solver.setup_work(), Work::default());
    }

    #[test]
    fn full_deflation_is_exact_without_descent() {
        let x = design();
        let solver = LingSolver::build(&x, LingConfig::new(3, 0, 4)).unwrap();
        assert!(!solver.rank_warning());
        assert!(orthonormality_deviation(&solver.basis().unwrap().u1) < 1e-12);
        let y = DenseMatrix::from_column_slice(6, 1, &[1.0, 2.0, -1.0, 0.0, 4.0, 1.0]);
        let xd = x.to_dense();
        let exact = &xd * (xd.tr_mul(&xd)).try_inverse().unwrap() * xd.tr_mul(&y);
        assert!(max_abs_diff(&solver.solve(&y).unwrap(), &exact) < 1e-10);
    }

    #[test]
    fn oversized_k_pc_is_clamped_with_warning() {
        let x = SparseMatrix::from_triplets(5, 3, vec![(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let solver = LingSolver::build(&x, LingConfig::new(10, 0, 1)).unwrap();
        assert!(solver.rank_warning());
        assert_eq!(solver.basis().unwrap().k_pc(), 2);
    }

    #[test]
    fn observed_work_matches_prediction() {
        let x = design();
        let solver = LingSolver::build(&x, LingConfig::new(1, 4, 2)).unwrap();
        let y = DenseMatrix::from_element(6, 2, 1.0);
        let mut work = Work::default();
        let mut seen = 0;
        solver
            .solve_observed(&y, &mut work, |_, _| seen += 1)
            .unwrap();
        assert_eq!(seen, 5);
        assert_eq!(work, solver.predicted_work(2));
    }
}
