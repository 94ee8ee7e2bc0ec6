use std::time::Instant;

use rand_chacha::ChaCha8Rng;

use super::{
    final_correlations, CcaResult, ConvergenceTrace, Diagnostics, SubspaceReference, TraceRecord,
};
use crate::error::{Error, Result, Side};
use crate::eval::subspace_dist;
use crate::linalg::{sparse_dense_mul, DenseMatrix, QrFactors, SparseMatrix, Work};
use crate::projector::LeastSquares;
use crate::random::{gaussian_matrix, rng, stream};

/// Attempts at replacing deficient iterate columns before giving up.
const MAX_REPAIR_ROUNDS: usize = 3;

/// Orthogonal iteration for the top `k_cca` canonical subspaces, with the
/// projections onto `span(X)` and `span(Y)` delegated to `ls_x` and `ls_y`:
///
/// ```text
/// X_0 = X G,            X^_0 = QR(X_0)
/// Y_t = LS_Y(X^_{t-1}), Y^_t = QR(Y_t)
/// X_t = LS_X(Y^_t),     X^_t = QR(X_t)      for t = 1..=t1
/// ```
///
/// When `reference` is given, every trace record carries the distance of
/// the current iterates to it.
pub fn iterative_ls_cca<Lx, Ly>(
    ls_x: &Lx,
    ls_y: &Ly,
    k_cca: usize,
    t1: usize,
    seed: u64,
    reference: Option<&SubspaceReference>,
) -> Result<CcaResult>
where
    Lx: LeastSquares + ?Sized,
    Ly: LeastSquares + ?Sized,
{
    let start = Instant::now();
    let (x, y) = (ls_x.design(), ls_y.design());
    validate(x, y, k_cca, t1)?;
    let n = x.n_rows();

    let mut work = Work::default();
    let mut trace = ConvergenceTrace::default();
    let mut repairs = 0;
    let mut fix_x = Repairer::new(x, Side::X, seed);
    let mut fix_y = Repairer::new(y, Side::Y, seed);

    let g = gaussian_matrix(&mut rng(seed, stream::START), x.n_cols(), k_cca);
    let x0 = sparse_dense_mul(x, &g)?;
    work.sparse(x.nnz(), k_cca);
    let mut x_hat = fix_x
        .orthonormalize(x0, &mut work, &mut repairs)?
        .ok_or_else(|| collapse(Side::X, 0, &trace))?;
    let mut y_hat = DenseMatrix::zeros(n, k_cca);

    for t in 1..=t1 {
        let y_t = ls_y.project(&x_hat, &mut work)?;
        y_hat = fix_y
            .orthonormalize(y_t, &mut work, &mut repairs)?
            .ok_or_else(|| collapse(Side::Y, t, &trace))?;
        let x_t = ls_x.project(&y_hat, &mut work)?;
        x_hat = fix_x
            .orthonormalize(x_t, &mut work, &mut repairs)?
            .ok_or_else(|| collapse(Side::X, t, &trace))?;

        let (dist_x, dist_y) = match reference {
            Some(r) => (
                Some(subspace_dist(&x_hat, &r.x)?),
                Some(subspace_dist(&y_hat, &r.y)?),
            ),
            None => (None, None),
        };
        trace.records.push(TraceRecord {
            iteration: t,
            dist_x,
            dist_y,
            correlation_sum: final_correlations(&x_hat, &y_hat)?.iter().sum(),
            seconds: start.elapsed().as_secs_f64(),
            work: work.total(),
            repairs,
        });
    }

    let correlations = final_correlations(&x_hat, &y_hat)?;
    work.dense(k_cca, n, k_cca);
    Ok(CcaResult {
        x_basis: x_hat,
        y_basis: y_hat,
        correlations,
        trace: Some(trace),
        wall_time: start.elapsed().as_secs_f64(),
        work,
        seed,
        diagnostics: Diagnostics {
            repairs,
            ..Diagnostics::default()
        },
    })
}

/// Work [`iterative_ls_cca`] records when no iterate needs repair.
pub(super) fn predicted_loop_work<Lx, Ly>(ls_x: &Lx, ls_y: &Ly, k_cca: usize, t1: usize) -> Work
where
    Lx: LeastSquares + ?Sized,
    Ly: LeastSquares + ?Sized,
{
    let x = ls_x.design();
    let n = x.n_rows();
    let mut w = Work::default();
    w.sparse(x.nnz(), k_cca);
    w.qr(n, k_cca);
    for _ in 0..t1 {
        w += ls_y.predicted_work(k_cca);
        w.qr(n, k_cca);
        w += ls_x.predicted_work(k_cca);
        w.qr(n, k_cca);
    }
    w.dense(k_cca, n, k_cca);
    w
}

pub(super) fn validate(x: &SparseMatrix, y: &SparseMatrix, k_cca: usize, t1: usize) -> Result<()> {
    if x.n_rows() != y.n_rows() {
        return Err(Error::shape(
            "iterative_ls_cca",
            format!("x has {} rows, y has {}", x.n_rows(), y.n_rows()),
        ));
    }
    let limit = x.n_cols().min(y.n_cols()).min(x.n_rows());
    if k_cca == 0 || k_cca > limit {
        return Err(Error::InvalidArgument(format!(
            "k_cca must lie in 1..={limit}, got {k_cca}"
        )));
    }
    if t1 == 0 {
        return Err(Error::InvalidArgument("t1 must be at least 1".into()));
    }
    Ok(())
}

fn collapse(side: Side, iteration: usize, trace: &ConvergenceTrace) -> Error {
    Error::RankCollapse {
        side,
        iteration,
        trace: Box::new(trace.clone()),
    }
}

/// Thin QR that replaces numerically dependent columns with fresh random
/// combinations `design * g`.
struct Repairer<'a> {
    design: &'a SparseMatrix,
    rng: ChaCha8Rng,
}

impl<'a> Repairer<'a> {
    fn new(design: &'a SparseMatrix, side: Side, seed: u64) -> Self {
        let s = match side {
            Side::X => stream::REPAIR_X,
            Side::Y => stream::REPAIR_Y,
        };
        Self {
            design,
            rng: rng(seed, s),
        }
    }

    /// `Ok(None)` when the iterate is still deficient after every round.
    fn orthonormalize(
        &mut self,
        mut m: DenseMatrix,
        work: &mut Work,
        repairs: &mut usize,
    ) -> Result<Option<DenseMatrix>> {
        // the subspace is scale-free; equal column norms keep the rank test
        // about linear dependence rather than magnitude
        normalize_columns(&mut m);
        let rows = m.nrows();
        let mut factors = QrFactors::compute(&m)?;
        work.qr(rows, m.ncols());
        for _ in 0..MAX_REPAIR_ROUNDS {
            let deficient = factors.deficient_columns();
            if deficient.is_empty() {
                return Ok(Some(factors.q));
            }
            *repairs += 1;
            let g = gaussian_matrix(&mut self.rng, self.design.n_cols(), deficient.len());
            let mut fresh = sparse_dense_mul(self.design, &g)?;
            work.sparse(self.design.nnz(), deficient.len());
            normalize_columns(&mut fresh);
            for (c, &j) in deficient.iter().enumerate() {
                m.set_column(j, &fresh.column(c));
            }
            factors = QrFactors::compute(&m)?;
            work.qr(rows, m.ncols());
        }
        Ok(factors.deficient_columns().is_empty().then_some(factors.q))
    }
}

fn normalize_columns(m: &mut DenseMatrix) {
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
}
