//! Loading sparse matrices from disk, indicator pairs from token streams,
//! and synthetic pairs with planted correlation.

mod libsvm;
mod mtx;
mod synth;
mod tokens;

pub use libsvm::{format_libsvm, parse_libsvm, read_libsvm, write_libsvm};
pub use mtx::{format_matrix_market, parse_matrix_market, read_matrix_market, write_matrix_market};
pub use synth::{synth_correlated, SharedLayout, SynthInstance, SynthSpec};
pub use tokens::{
    read_tokens, tokens_to_indicators, MarkovTokens, TokenDatasetSpec, TokenIndicators, TokenSource,
};
