use std::path::PathBuf;

use thiserror::Error;

use crate::cca::ConvergenceTrace;

/// Which of the two data views an error or diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    X,
    Y,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::X => f.write_str("x"),
            Side::Y => f.write_str("y"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("matrix has numerical rank {rank} < {cols} columns (deficient columns {deficient:?})")]
    RankDeficient {
        rank: usize,
        cols: usize,
        deficient: Vec<usize>,
    },

    #[error("invalid sparse matrix: {0}")]
    InvalidSparse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gram matrix of the {side} view is numerically singular (min eigenvalue {min_eigenvalue:e} below floor {floor:e}); enable ridge repair")]
    SingularGram {
        side: Side,
        min_eigenvalue: f64,
        floor: f64,
    },

    #[error("iterate on the {side} side collapsed at outer iteration {iteration} and could not be repaired")]
    RankCollapse {
        side: Side,
        iteration: usize,
        trace: Box<ConvergenceTrace>,
    },

    #[error("{side} view has rank {rank}, fewer than the {needed} columns requested")]
    InsufficientRank {
        side: Side,
        rank: usize,
        needed: usize,
    },

    #[error("input is not orthonormal (max deviation {deviation:e} from identity)")]
    NotOrthonormal { deviation: f64 },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
