use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::exact::{exact_result, ExactOptions};
use super::iterative::{iterative_ls_cca, predicted_loop_work, validate};
use super::{final_correlations, CcaResult, Diagnostics, SubspaceReference};
use crate::error::{Error, Result, Side};
use crate::linalg::{svd_desc, SparseMatrix, Work};
use crate::ling::{self, LingConfig, LingSolver};
use crate::projector::{DiagonalProjector, LeastSquares};
use crate::random::{derive_seed, stream};
use crate::rsvd::{self, randomized_top_singulars, RangeBasis, RsvdParams};

/// L-CCA: orthogonal iteration with LING projections on both sides.
///
/// Both solvers are built once, with seeds derived from `ling.seed`, and
/// reused for all `t1` iterations.
pub fn l_cca(
    x: &SparseMatrix,
    y: &SparseMatrix,
    k_cca: usize,
    t1: usize,
    ling: LingConfig,
    reference: Option<&SubspaceReference>,
) -> Result<CcaResult> {
    validate(x, y, k_cca, t1)?;
    let start = Instant::now();
    let (cfg_x, cfg_y) = side_configs(ling);
    let ls_x = LingSolver::build(x, cfg_x)?;
    let ls_y = LingSolver::build(y, cfg_y)?;
    let mut result = iterative_ls_cca(&ls_x, &ls_y, k_cca, t1, ling.seed, reference)?;
    result.work += ls_x.setup_work();
    result.work += ls_y.setup_work();
    result.diagnostics.rank_warning_x = ls_x.rank_warning();
    result.diagnostics.rank_warning_y = ls_y.rank_warning();
    result.wall_time = start.elapsed().as_secs_f64();
    Ok(result)
}

/// G-CCA: L-CCA without the exact top-singular-vector stage.
pub fn g_cca(
    x: &SparseMatrix,
    y: &SparseMatrix,
    k_cca: usize,
    t1: usize,
    t2: usize,
    seed: u64,
    reference: Option<&SubspaceReference>,
) -> Result<CcaResult> {
    l_cca(x, y, k_cca, t1, LingConfig::new(0, t2, seed), reference)
}

/// D-CCA: each projection approximated by `X diag(X^T X)^-1 X^T`.
pub fn d_cca(
    x: &SparseMatrix,
    y: &SparseMatrix,
    k_cca: usize,
    t1: usize,
    seed: u64,
    reference: Option<&SubspaceReference>,
) -> Result<CcaResult> {
    let ls_x = DiagonalProjector::new(x);
    let ls_y = DiagonalProjector::new(y);
    let mut result = iterative_ls_cca(&ls_x, &ls_y, k_cca, t1, seed, reference)?;
    result.work.sparse(x.nnz(), 1);
    result.work.sparse(y.nnz(), 1);
    result.diagnostics.zero_columns_x = ls_x.zero_columns();
    result.diagnostics.zero_columns_y = ls_y.zero_columns();
    Ok(result)
}

/// RPCCA: exact CCA between the top `k_rpcca` left singular subspaces of
/// each side.
pub fn rp_cca(
    x: &SparseMatrix,
    y: &SparseMatrix,
    k_cca: usize,
    k_rpcca: usize,
    params: RsvdParams,
    seed: u64,
) -> Result<CcaResult> {
    validate(x, y, k_cca, 1)?;
    if k_rpcca < k_cca {
        return Err(Error::InvalidArgument(format!(
            "k_rpcca ({k_rpcca}) must be at least k_cca ({k_cca})"
        )));
    }
    let start = Instant::now();
    let n = x.n_rows();
    // a view with fewer than k_rpcca columns contributes its whole range
    let (kx, ky) = (
        k_rpcca.min(x.n_cols()).min(n),
        k_rpcca.min(y.n_cols()).min(n),
    );
    let bx = randomized_top_singulars(x, kx, params, derive_seed(seed, stream::BASIS_X))?;
    let by = randomized_top_singulars(y, ky, params, derive_seed(seed, stream::BASIS_Y))?;
    check_rank(&bx, Side::X, k_cca)?;
    check_rank(&by, Side::Y, k_cca)?;

    let (kx, ky) = (bx.k_pc(), by.k_pc());
    let mut work = bx.work;
    work += by.work;
    let svd = svd_desc(&bx.u1.tr_mul(&by.u1));
    work.dense(kx, n, ky);
    let x_basis = &bx.u1 * svd.u.columns(0, k_cca);
    let y_basis = &by.u1 * svd.v.columns(0, k_cca);
    work.dense(n, kx, k_cca);
    work.dense(n, ky, k_cca);
    let correlations = final_correlations(&x_basis, &y_basis)?;
    work.dense(k_cca, n, k_cca);
    Ok(CcaResult {
        x_basis,
        y_basis,
        correlations,
        trace: None,
        wall_time: start.elapsed().as_secs_f64(),
        work,
        seed,
        diagnostics: Diagnostics {
            rank_warning_x: bx.rank_deficient,
            rank_warning_y: by.rank_deficient,
            ..Diagnostics::default()
        },
    })
}

fn side_configs(ling: LingConfig) -> (LingConfig, LingConfig) {
    (
        LingConfig {
            seed: derive_seed(ling.seed, stream::BASIS_X),
            ..ling
        },
        LingConfig {
            seed: derive_seed(ling.seed, stream::BASIS_Y),
            ..ling
        },
    )
}

fn check_rank(basis: &RangeBasis, side: Side, needed: usize) -> Result<()> {
    if basis.k_pc() < needed {
        return Err(Error::InsufficientRank {
            side,
            rank: basis.k_pc(),
            needed,
        });
    }
    Ok(())
}

/// One of the five CCA algorithms with its tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Algorithm {
    Exact {
        ridge: bool,
    },
    Lcca {
        t1: usize,
        t2: usize,
        k_pc: usize,
        rsvd: RsvdParams,
    },
    Dcca {
        t1: usize,
    },
    Gcca {
        t1: usize,
        t2: usize,
    },
    Rpcca {
        k_rpcca: usize,
        rsvd: RsvdParams,
    },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Exact { .. } => "exact",
            Algorithm::Lcca { .. } => "lcca",
            Algorithm::Dcca { .. } => "dcca",
            Algorithm::Gcca { .. } => "gcca",
            Algorithm::Rpcca { .. } => "rpcca",
        }
    }

    /// Runs the algorithm. `reference` only feeds the convergence trace of
    /// the iterative schemes.
    pub fn run(
        &self,
        x: &SparseMatrix,
        y: &SparseMatrix,
        k_cca: usize,
        seed: u64,
        reference: Option<&SubspaceReference>,
    ) -> Result<CcaResult> {
        match *self {
            Algorithm::Exact { ridge } => exact_result(x, y, k_cca, ExactOptions { ridge }, seed),
            Algorithm::Lcca { t1, t2, k_pc, rsvd } => {
                let ling = LingConfig {
                    k_pc,
                    t2,
                    rsvd,
                    seed,
                };
                l_cca(x, y, k_cca, t1, ling, reference)
            }
            Algorithm::Dcca { t1 } => d_cca(x, y, k_cca, t1, seed, reference),
            Algorithm::Gcca { t1, t2 } => g_cca(x, y, k_cca, t1, t2, seed, reference),
            Algorithm::Rpcca { k_rpcca, rsvd } => rp_cca(x, y, k_cca, k_rpcca, rsvd, seed),
        }
    }

    /// Work a run records on full-rank data with no iterate repairs, from
    /// the shapes alone.
    pub fn predicted_work(&self, x: &SparseMatrix, y: &SparseMatrix, k_cca: usize) -> Work {
        let n = x.n_rows();
        match *self {
            Algorithm::Exact { .. } => {
                let (p1, p2) = (x.n_cols(), y.n_cols());
                let mut w = Work::default();
                w.sparse_madds += (x.gram_cost() + y.gram_cost()) as u64;
                w.sparse_madds += (0..n)
                    .map(|i| (x.row(i).0.len() * y.row(i).0.len()) as u64)
                    .sum::<u64>();
                w.dense(p1, p1, p2);
                w.dense(p1, p2, p2);
                w.dense(p1, p1, k_cca);
                w.dense(p2, p2, k_cca);
                w.sparse(x.nnz(), k_cca);
                w.sparse(y.nnz(), k_cca);
                w.qr(n, k_cca);
                w.qr(n, k_cca);
                w.dense(k_cca, n, k_cca);
                w
            }
            Algorithm::Lcca { t1, t2, k_pc, rsvd } => {
                let sx = SolverShape::ling(x, k_pc, t2, rsvd);
                let sy = SolverShape::ling(y, k_pc, t2, rsvd);
                let mut w = predicted_loop_work(&sx, &sy, k_cca, t1);
                w += sx.setup;
                w += sy.setup;
                w
            }
            Algorithm::Gcca { t1, t2 } => Algorithm::Lcca {
                t1,
                t2,
                k_pc: 0,
                rsvd: RsvdParams::default(),
            }
            .predicted_work(x, y, k_cca),
            Algorithm::Dcca { t1 } => {
                let mut w = predicted_loop_work(
                    &DiagonalProjector::new(x),
                    &DiagonalProjector::new(y),
                    k_cca,
                    t1,
                );
                w.sparse(x.nnz(), 1);
                w.sparse(y.nnz(), 1);
                w
            }
            Algorithm::Rpcca { k_rpcca, rsvd } => {
                let kx = k_rpcca.min(n.min(x.n_cols()));
                let ky = k_rpcca.min(n.min(y.n_cols()));
                let mut w = rsvd::predicted_work(x.nnz(), n, x.n_cols(), kx, rsvd);
                w += rsvd::predicted_work(y.nnz(), n, y.n_cols(), ky, rsvd);
                w.dense(kx, n, ky);
                w.dense(n, kx, k_cca);
                w.dense(n, ky, k_cca);
                w.dense(k_cca, n, k_cca);
                w
            }
        }
    }
}

impl Algorithm {
    /// The parameter a budget match adjusts: `t2` for the gradient schemes,
    /// `t1` for D-CCA, `k_rpcca` for RPCCA. `None` for the exact oracle.
    pub fn budget_knob(&self) -> Option<usize> {
        match *self {
            Algorithm::Exact { .. } => None,
            Algorithm::Lcca { t2, .. } | Algorithm::Gcca { t2, .. } => Some(t2),
            Algorithm::Dcca { t1 } => Some(t1),
            Algorithm::Rpcca { k_rpcca, .. } => Some(k_rpcca),
        }
    }

    fn with_knob(&self, value: usize) -> Self {
        let mut out = *self;
        match &mut out {
            Algorithm::Exact { .. } => {}
            Algorithm::Lcca { t2, .. } | Algorithm::Gcca { t2, .. } => *t2 = value,
            Algorithm::Dcca { t1 } => *t1 = value,
            Algorithm::Rpcca { k_rpcca, .. } => *k_rpcca = value,
        }
        out
    }

    /// Copy of `self` with its budget knob set to the largest value whose
    /// predicted [`Work::total`] does not exceed `budget` (or to the
    /// smallest allowed value when none fits). The exact oracle is returned
    /// unchanged.
    pub fn matched_to(
        &self,
        budget: u64,
        x: &SparseMatrix,
        y: &SparseMatrix,
        k_cca: usize,
    ) -> Self {
        let (lo, hi) = match *self {
            Algorithm::Exact { .. } => return *self,
            Algorithm::Lcca { .. } | Algorithm::Gcca { .. } => (0, 1 << 24),
            Algorithm::Dcca { .. } => (1, 1 << 24),
            Algorithm::Rpcca { .. } => (k_cca, x.n_cols().min(y.n_cols()).min(x.n_rows())),
        };
        let cost = |v: usize| self.with_knob(v).predicted_work(x, y, k_cca).total();
        if cost(lo) > budget {
            return self.with_knob(lo);
        }
        // cost is non-decreasing in the knob: largest v in [lo, hi] with cost(v) <= budget
        let (mut good, mut bad) = (lo, hi + 1);
        while bad - good > 1 {
            let mid = good + (bad - good) / 2;
            if cost(mid) <= budget {
                good = mid;
            } else {
                bad = mid;
            }
        }
        self.with_knob(good)
    }
}

/// Stand-in for a [`LingSolver`] that predicts its work without building
/// the basis.
struct SolverShape<'a> {
    x: &'a SparseMatrix,
    k_pc: usize,
    t2: usize,
    setup: Work,
}

impl<'a> SolverShape<'a> {
    fn ling(x: &'a SparseMatrix, k_pc: usize, t2: usize, params: RsvdParams) -> Self {
        let (n, p) = x.shape();
        let k_pc = k_pc.min(n.min(p));
        let setup = if k_pc == 0 {
            Work::default()
        } else {
            rsvd::predicted_work(x.nnz(), n, p, k_pc, params)
        };
        Self { x, k_pc, t2, setup }
    }
}

impl LeastSquares for SolverShape<'_> {
    fn design(&self) -> &SparseMatrix {
        self.x
    }

    fn project(
        &self,
        _: &crate::linalg::DenseMatrix,
        _: &mut Work,
    ) -> Result<crate::linalg::DenseMatrix> {
        Err(Error::InvalidArgument(
            "work-prediction stand-in cannot project".into(),
        ))
    }

    fn predicted_work(&self, m: usize) -> Work {
        ling::solve_work(self.x, self.k_pc, self.t2, m)
    }
}
