//! Paired indicator matrices from a token stream: row `i` of `x` marks the
//! current token of the `i`-th retained bigram, row `i` of `y` the token
//! after it.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::random::{rng, stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenSource {
    Inline(Vec<String>),
    /// UTF-8 text split on whitespace.
    File(PathBuf),
    Markov(MarkovTokens),
}

impl TokenSource {
    pub fn load(&self) -> Result<Vec<String>> {
        match self {
            TokenSource::Inline(tokens) => Ok(tokens.clone()),
            TokenSource::File(path) => read_tokens(path),
            TokenSource::Markov(spec) => spec.generate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDatasetSpec {
    pub source: TokenSource,
    /// Features kept on the `x` side after dropping; 0 keeps all.
    #[serde(default)]
    pub x_vocab_limit: usize,
    #[serde(default)]
    pub y_vocab_limit: usize,
    /// Most frequent `x` features removed before the limit applies.
    #[serde(default)]
    pub x_drop_top: usize,
    #[serde(default)]
    pub y_drop_top: usize,
    /// Token separating documents; no bigram spans it.
    #[serde(default)]
    pub boundary: Option<String>,
}

impl TokenDatasetSpec {
    pub fn new(source: TokenSource) -> Self {
        Self {
            source,
            x_vocab_limit: 0,
            y_vocab_limit: 0,
            x_drop_top: 0,
            y_drop_top: 0,
            boundary: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TokenIndicators {
    pub x: SparseMatrix,
    pub y: SparseMatrix,
    /// Token of each `x` column.
    pub x_vocab: Vec<String>,
    pub y_vocab: Vec<String>,
}

pub fn read_tokens(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    Ok(text.split_whitespace().map(str::to_owned).collect())
}

/// Builds the indicator pair.
///
/// Each side ranks every distinct token of the stream by how often it
/// occurs in that role (current token for `x`, next token for `y`), ties
/// broken by first appearance. The top `drop_top` are removed, then the
/// next `vocab_limit` (all, when 0) become columns in rank order. Bigrams
/// whose current or next token is not a column are skipped.
pub fn tokens_to_indicators(spec: &TokenDatasetSpec) -> Result<TokenIndicators> {
    let tokens = spec.source.load()?;
    if tokens.is_empty() {
        return Err(Error::InvalidArgument("token stream is empty".into()));
    }
    let boundary = spec.boundary.as_deref();

    // ids in first-appearance order
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut names: Vec<&str> = Vec::new();
    let stream_ids: Vec<Option<usize>> = tokens
        .iter()
        .map(|t| {
            if Some(t.as_str()) == boundary {
                return None;
            }
            Some(*ids.entry(t).or_insert_with(|| {
                names.push(t);
                names.len() - 1
            }))
        })
        .collect();

    let bigrams: Vec<(usize, usize)> = stream_ids
        .windows(2)
        .filter_map(|w| Some((w[0]?, w[1]?)))
        .collect();
    let mut current_counts = vec![0usize; names.len()];
    let mut next_counts = vec![0usize; names.len()];
    for &(a, b) in &bigrams {
        current_counts[a] += 1;
        next_counts[b] += 1;
    }

    let x_cols = select(&current_counts, spec.x_drop_top, spec.x_vocab_limit);
    let y_cols = select(&next_counts, spec.y_drop_top, spec.y_vocab_limit);
    let column_of = |cols: &[usize]| {
        let mut map = vec![None; names.len()];
        for (c, &id) in cols.iter().enumerate() {
            map[id] = Some(c);
        }
        map
    };
    let (x_map, y_map) = (column_of(&x_cols), column_of(&y_cols));

    let mut x_entries = Vec::new();
    let mut y_entries = Vec::new();
    for &(a, b) in &bigrams {
        if let (Some(ca), Some(cb)) = (x_map[a], y_map[b]) {
            let row = x_entries.len();
            x_entries.push((row, ca, 1.0));
            y_entries.push((row, cb, 1.0));
        }
    }
    if x_entries.is_empty() {
        return Err(Error::InvalidArgument(
            "no bigram survives the vocabulary limits".into(),
        ));
    }
    let rows = x_entries.len();
    let vocab = |cols: &[usize]| cols.iter().map(|&id| names[id].to_owned()).collect();
    Ok(TokenIndicators {
        x: SparseMatrix::from_triplets(rows, x_cols.len(), x_entries)?,
        y: SparseMatrix::from_triplets(rows, y_cols.len(), y_entries)?,
        x_vocab: vocab(&x_cols),
        y_vocab: vocab(&y_cols),
    })
}

/// Token ids ranked by count (stable, so ties keep first-appearance order),
/// with the top `drop` removed and at most `limit` kept.
fn select(counts: &[usize], drop: usize, limit: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]));
    let kept = order.into_iter().skip(drop);
    if limit == 0 {
        kept.collect()
    } else {
        kept.take(limit).collect()
    }
}

/// A first-order Markov token stream with planted group structure.
///
/// The vocabulary `w0 .. w{vocab-1}` is split into `groups` groups by
/// `index % groups`. With probability `stickiness` the next token comes
/// from the group after the current one, otherwise from a uniformly random
/// group; within a group tokens are uniform. The bigram indicators then
/// carry `groups - 1` canonical correlations near `stickiness` on top of
/// the trivial one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovTokens {
    pub length: usize,
    pub vocab: usize,
    pub groups: usize,
    pub stickiness: f64,
    pub seed: u64,
}

impl MarkovTokens {
    pub fn generate(&self) -> Result<Vec<String>> {
        if self.groups == 0 || self.vocab < self.groups || self.length == 0 {
            return Err(Error::InvalidArgument(format!(
                "markov tokens need 1 <= groups <= vocab and length >= 1, got groups {} vocab {} length {}",
                self.groups, self.vocab, self.length
            )));
        }
        if !(0.0..=1.0).contains(&self.stickiness) {
            return Err(Error::InvalidArgument(format!(
                "stickiness must lie in [0, 1], got {}",
                self.stickiness
            )));
        }
        let members: Vec<Vec<usize>> = (0..self.groups)
            .map(|g| (g..self.vocab).step_by(self.groups).collect())
            .collect();
        let mut rng = rng(self.seed, stream::TOKENS);
        let mut current = rng.random_range(0..self.vocab);
        let mut out = Vec::with_capacity(self.length);
        out.push(format!("w{current}"));
        for _ in 1..self.length {
            let group = if rng.random_bool(self.stickiness) {
                (current % self.groups + 1) % self.groups
            } else {
                rng.random_range(0..self.groups)
            };
            let pool = &members[group];
            current = pool[rng.random_range(0..pool.len())];
            out.push(format!("w{current}"));
        }
        Ok(out)
    }
}
