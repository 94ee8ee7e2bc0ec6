//! Matrix Market coordinate format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<SparseMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.into(),
        source,
    })?;
    parse_matrix_market(BufReader::new(file), path)
}

/// Parses coordinate Matrix Market text; `origin` labels error messages.
/// Duplicate coordinates are summed.
pub fn parse_matrix_market(reader: impl BufRead, origin: impl AsRef<Path>) -> Result<SparseMatrix> {
    let origin = origin.as_ref();
    let fail = |line: usize, message: String| Error::Parse {
        path: origin.into(),
        line,
        message,
    };
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = || -> Result<Option<(usize, String)>> {
        match lines.next() {
            None => Ok(None),
            Some((no, Ok(text))) => Ok(Some((no, text))),
            Some((no, Err(e))) => Err(fail(no, e.to_string())),
        }
    };

    let (_, header) = next_line()?.ok_or_else(|| fail(1, "empty file".into()))?;
    let field = parse_header(&header).map_err(|m| fail(1, m))?;

    let mut last = 1;
    let (size_line, size) = loop {
        let (no, text) = next_line()?.ok_or_else(|| fail(last + 1, "missing size line".into()))?;
        last = no;
        let t = text.trim();
        if !t.is_empty() && !t.starts_with('%') {
            break (no, t.to_owned());
        }
    };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| fail(size_line, format!("bad size line {size:?}: {e}")))?;
    let [n_rows, n_cols, nnz] = dims[..] else {
        return Err(fail(
            size_line,
            format!("size line needs 3 integers, got {size:?}"),
        ));
    };

    let mut triplets = Vec::with_capacity(nnz);
    while let Some((no, text)) = next_line()? {
        last = no;
        let t = text.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if triplets.len() == nnz {
            return Err(fail(no, format!("more than the {nnz} declared entries")));
        }
        triplets.push(parse_entry(t, field, n_rows, n_cols).map_err(|m| fail(no, m))?);
    }
    if triplets.len() != nnz {
        return Err(fail(
            last,
            format!("expected {nnz} entries, found {}", triplets.len()),
        ));
    }
    SparseMatrix::from_triplets(n_rows, n_cols, triplets)
        .map_err(|e| fail(size_line, e.to_string()))
}

fn parse_header(header: &str) -> std::result::Result<Field, String> {
    let words: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if words.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(format!("missing %%MatrixMarket banner: {header:?}"));
    }
    match words.iter().skip(1).map(String::as_str).collect::<Vec<_>>()[..] {
        ["matrix", "coordinate", field, "general"] => match field {
            "real" => Ok(Field::Real),
            "integer" => Ok(Field::Integer),
            "pattern" => Ok(Field::Pattern),
            other => Err(format!("unsupported field {other:?}")),
        },
        _ => Err(format!(
            "unsupported header {header:?}; expected \"%%MatrixMarket matrix coordinate real general\""
        )),
    }
}

fn parse_entry(
    line: &str,
    field: Field,
    n_rows: usize,
    n_cols: usize,
) -> std::result::Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let expected = if field == Field::Pattern { 2 } else { 3 };
    if parts.len() != expected {
        return Err(format!("expected {expected} fields, got {line:?}"));
    }
    let index = |s: &str, bound: usize, what: &str| -> std::result::Result<usize, String> {
        let i: usize = s.parse().map_err(|_| format!("bad {what} index {s:?}"))?;
        if i == 0 || i > bound {
            return Err(format!("{what} index {i} outside 1..={bound}"));
        }
        Ok(i - 1)
    };
    let i = index(parts[0], n_rows, "row")?;
    let j = index(parts[1], n_cols, "column")?;
    let v = match field {
        Field::Pattern => 1.0,
        _ => {
            let v: f64 = parts[2]
                .parse()
                .map_err(|_| format!("bad value {:?}", parts[2]))?;
            if !v.is_finite() {
                return Err(format!("value {v} is not finite"));
            }
            v
        }
    };
    Ok((i, j, v))
}

/// Writes `m` as a real general coordinate file, entries in row order with
/// values in shortest round-trip form.
pub fn write_matrix_market(path: impl AsRef<Path>, m: &SparseMatrix) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.into(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    format_matrix_market(&mut out, m).map_err(io)?;
    out.flush().map_err(io)
}

pub fn format_matrix_market(out: &mut impl Write, m: &SparseMatrix) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}
