//! Shared fixtures for the benchmarks.

use lcca_core::ingest::{synth_correlated, SharedLayout, SynthInstance, SynthSpec};
use lcca_core::{Algorithm, DenseMatrix, RsvdParams, SparseMatrix};

pub const K_CCA: usize = 20;

/// Sparse pair with 20 planted correlations and column scales
/// `(j + 1)^-decay`.
pub fn pair(n: usize, p: usize, decay: f64) -> SynthInstance {
    synth_correlated(&SynthSpec {
        n,
        p1: p,
        p2: p,
        k_shared: K_CCA,
        planted_corrs: (0..K_CCA).map(|i| 0.95 - 0.03 * i as f64).collect(),
        spectrum_decay: decay,
        density: 0.02,
        seed: 11,
        shared_layout: SharedLayout::Spread,
        design_coupling: 0.0,
    })
    .expect("valid fixture spec")
}

/// Deterministic dense block with no special structure.
pub fn block(n: usize, k: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, k, |i, j| ((i * 31 + j * 17) as f64 * 0.618).sin())
}

/// L-CCA at the settings used for the accuracy comparisons, followed by
/// G-CCA, D-CCA and RP-CCA given the same predicted work.
pub fn matched_lineup(x: &SparseMatrix, y: &SparseMatrix) -> Vec<Algorithm> {
    let lcca = Algorithm::Lcca {
        t1: 5,
        t2: 7,
        k_pc: 100,
        rsvd: RsvdParams::default(),
    };
    let budget = lcca.predicted_work(x, y, K_CCA).total();
    let others = [
        Algorithm::Gcca { t1: 5, t2: 1 },
        Algorithm::Dcca { t1: 1 },
        Algorithm::Rpcca {
            k_rpcca: K_CCA,
            rsvd: RsvdParams::default(),
        },
    ];
    std::iter::once(lcca)
        .chain(others.iter().map(|a| a.matched_to(budget, x, y, K_CCA)))
        .collect()
}
