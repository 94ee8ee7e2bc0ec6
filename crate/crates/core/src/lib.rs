//! Fast canonical correlation analysis for large sparse data.
//!
//! The top canonical subspaces of two views `x` (`n x p1`) and `y`
//! (`n x p2`) are found by orthogonal iteration, where each step projects
//! the current block onto the column space of the other view. The schemes
//! differ in how that least-squares projection is approximated:
//!
//! | scheme    | projection                                               |
//! |-----------|----------------------------------------------------------|
//! | [`l_cca`] | exact on the top `k_pc` singular directions + gradient steps |
//! | [`g_cca`] | gradient steps only                                      |
//! | [`d_cca`] | inverse of the Gram diagonal                             |
//! | [`rp_cca`]| CCA restricted to the top `k_rpcca` singular directions  |
//!
//! [`exact_cca`] is the dense reference used to check all of them.

pub mod cca;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod linalg;
pub mod ling;
pub mod projector;
pub mod random;
pub mod rsvd;

pub use cca::{
    d_cca, exact_cca, final_correlations, g_cca, iterative_ls_cca, l_cca, rp_cca, Algorithm,
    CcaResult, ConvergenceTrace, Diagnostics, ExactCcaFactors, ExactOptions, SubspaceReference,
    TraceRecord,
};
pub use error::{Error, Result, Side};
pub use eval::{captured_correlation_sum, fit_geometric_rate, subspace_dist, RateFit};
pub use linalg::{DenseMatrix, SparseMatrix, Work};
pub use ling::{gd_least_squares, LingConfig, LingSolver};
pub use projector::{DiagonalProjector, ExactProjector, LeastSquares};
pub use rsvd::{randomized_top_singulars, RangeBasis, RsvdParams};
