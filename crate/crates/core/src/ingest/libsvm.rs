//! libsvm / svmlight text format: `label idx:val idx:val ...`, 1-based
//! feature indices, one sample per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

/// Reads a libsvm file into an `(lines) x n_cols` matrix. Labels and `qid`
/// fields are discarded, `#` starts a comment, and an empty line is an
/// all-zero row.
pub fn read_libsvm(path: impl AsRef<Path>, n_cols: usize) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_libsvm(BufReader::new(file), n_cols, path)
}

pub fn parse_libsvm(
    reader: impl BufRead,
    n_cols: usize,
    origin: impl AsRef<Path>,
) -> Result<SparseMatrix> {
    let origin = origin.as_ref();
    let fail = |line: usize, message: String| Error::Parse {
        path: origin.into(),
        line,
        message,
    };
    let mut triplets = Vec::new();
    let mut rows = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| fail(i + 1, e.to_string()))?;
        let content = line.split('#').next().unwrap_or("");
        let mut fields = content.split_whitespace();
        if let Some(label) = fields.next() {
            if label.contains(':') {
                return Err(fail(
                    i + 1,
                    format!("line starts with feature {label:?}, not a label"),
                ));
            }
        }
        for field in fields {
            if field.starts_with("qid:") {
                continue;
            }
            let (idx, val) = field
                .split_once(':')
                .ok_or_else(|| fail(i + 1, format!("expected idx:val, got {field:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| fail(i + 1, format!("bad feature index {idx:?}")))?;
            if idx == 0 || idx > n_cols {
                return Err(fail(
                    i + 1,
                    format!("feature index {idx} outside 1..={n_cols}"),
                ));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| fail(i + 1, format!("bad feature value {val:?}")))?;
            if !val.is_finite() {
                return Err(fail(i + 1, format!("feature value {val} is not finite")));
            }
            triplets.push((rows, idx - 1, val));
        }
        rows += 1;
    }
    SparseMatrix::from_triplets(rows, n_cols, triplets)
}

/// Writes `m` with label `0` on every line.
pub fn write_libsvm(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.into(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    format_libsvm(&mut out, m).map_err(io)?;
    out.flush().map_err(io)
}

pub fn format_libsvm(out: &mut impl Write, m: &SparseMatrix) -> std::io::Result<()> {
    for i in 0..m.n_rows() {
        write!(out, "0")?;
        let (cols, vals) = m.row(i);
        for (j, v) in cols.iter().zip(vals) {
            write!(out, " {}:{:e}", j + 1, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
