#![allow(dead_code)]

use lcca_core::{DenseMatrix, SparseMatrix};
use lcca_testkit::{to_triplets, Gen, PlantedPair};

pub fn sparse(n: usize, p: usize, t: &[(usize, usize, f64)]) -> SparseMatrix {
    SparseMatrix::from_triplets(n, p, t.iter().copied()).unwrap()
}

pub fn from_dense(m: &DenseMatrix) -> SparseMatrix {
    sparse(m.nrows(), m.ncols(), &to_triplets(m))
}

pub fn random_sparse(seed: u64, n: usize, p: usize, density: f64, decay: f64) -> SparseMatrix {
    sparse(n, p, &Gen::new(seed).sparse(n, p, density, decay))
}

/// 200 x 20 / 200 x 15 pair with canonical correlations
/// 0.95, 0.90, 0.85, 0.80, 0.75 | 0.50, 0.45, ... so that d6 / d5 = 2/3, and
/// singular values spread geometrically over `1..=1/kappa` on both sides.
pub fn separated_pair(seed: u64, kappa: f64) -> (SparseMatrix, SparseMatrix, Vec<f64>) {
    let d: Vec<f64> = [0.95, 0.9, 0.85, 0.8, 0.75]
        .into_iter()
        .chain((0..10).map(|j| 0.5 - 0.05 * j as f64))
        .collect();
    let xs = lcca_testkit::geometric(20, 1.0 / kappa);
    let ys = lcca_testkit::geometric(15, 1.0 / kappa);
    let (x, y) = PlantedPair {
        n: 200,
        d: &d,
        x_scales: &xs,
        y_scales: &ys,
        rotate: true,
    }
    .build(&mut Gen::new(seed));
    (from_dense(&x), from_dense(&y), d)
}
