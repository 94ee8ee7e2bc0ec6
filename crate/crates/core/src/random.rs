//! Seeded randomness.
//!
//! Every random draw in the crate comes from a ChaCha8 generator seeded with
//! `seed_from_u64(seed)` and switched to a fixed stream per purpose, so each
//! consumer sees an independent sequence that is identical on every
//! platform. Normal variates use the ziggurat sampler of `rand_distr`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::DenseMatrix;

/// Stream identifiers. Changing these changes every seeded result.
pub mod stream {
    pub const START: u64 = 0;
    pub const BASIS_X: u64 = 1;
    pub const BASIS_Y: u64 = 2;
    pub const REPAIR_X: u64 = 3;
    pub const REPAIR_Y: u64 = 4;
    pub const SYNTH: u64 = 10;
    pub const TOKENS: u64 = 11;
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for a sub-computation that runs its own seeded routine.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    rng(seed, stream).next_u64()
}

/// `rows x cols` block of i.i.d. standard normal entries, filled column by column.
pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| StandardNormal.sample(&mut *rng))
        .collect();
    DenseMatrix::from_vec(rows, cols, data)
}
