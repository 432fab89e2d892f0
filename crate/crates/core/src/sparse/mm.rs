//! Matrix Market exchange format.
//!
//! Reads `coordinate` matrices with `real`, `integer` or `pattern` fields and
//! `general` or `symmetric` symmetry. Indices are 1-based on disk and 0-based
//! everywhere else.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{DenseBlock, SparseSymMatrix, Symmetry};
use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check of `general` matrices.
pub const GENERAL_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

pub fn load_matrix_market(path: impl AsRef<Path>) -> Result<SparseSymMatrix> {
    let file = File::open(path.as_ref())?;
    read_matrix_market(BufReader::new(file))
}

pub fn read_matrix_market(reader: impl BufRead) -> Result<SparseSymMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = match lines.next() {
        Some((n, l)) => (n, l?),
        None => return Err(Error::parse(1, "empty file")),
    };
    let (field, symmetric) = parse_header(lineno, &header)?;

    // size line: first non-comment, non-blank line
    let mut size = None;
    for (lineno, line) in lines.by_ref() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        size = Some((lineno, t.to_string()));
        break;
    }
    let (size_line, size) = size.ok_or_else(|| Error::parse(lineno, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|tok| tok.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::parse(size_line, format!("bad size line: {e}")))?;
    let &[rows, cols, nnz] = dims.as_slice() else {
        return Err(Error::parse(size_line, "size line needs `rows cols nnz`"));
    };
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }

    let mut triplets = Vec::with_capacity(nnz);
    for (lineno, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if triplets.len() == nnz {
            return Err(Error::parse(lineno, format!("more than {nnz} entries")));
        }
        let mut toks = t.split_whitespace();
        let mut index = |what: &str| -> Result<usize> {
            let tok = toks
                .next()
                .ok_or_else(|| Error::parse(lineno, format!("missing {what} index")))?;
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad {what} index `{tok}`")))?;
            if v == 0 || v > rows {
                return Err(Error::parse(
                    lineno,
                    format!("{what} index {v} out of range 1..={rows}"),
                ));
            }
            Ok(v - 1)
        };
        let i = index("row")?;
        let j = index("column")?;
        let value = match field {
            Field::Pattern => 1.0,
            Field::Real | Field::Integer => {
                let tok = toks
                    .next()
                    .ok_or_else(|| Error::parse(lineno, "missing value"))?;
                let v: f64 = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad value `{tok}`")))?;
                if !v.is_finite() {
                    return Err(Error::parse(lineno, "non-finite value"));
                }
                v
            }
        };
        if toks.next().is_some() {
            return Err(Error::parse(lineno, "trailing tokens after entry"));
        }
        triplets.push((i, j, value));
    }
    if triplets.len() != nnz {
        return Err(Error::parse(
            size_line,
            format!("expected {nnz} entries, found {}", triplets.len()),
        ));
    }

    let symmetry = if symmetric {
        Symmetry::Symmetric
    } else {
        Symmetry::General {
            tol: GENERAL_SYMMETRY_TOL,
        }
    };
    SparseSymMatrix::from_triplets(rows, &triplets, symmetry)
}

fn parse_header(lineno: usize, header: &str) -> Result<(Field, bool)> {
    let toks: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if toks.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(Error::parse(lineno, "missing %%MatrixMarket banner"));
    }
    let [_, object, format, field, symmetry] = toks.as_slice() else {
        return Err(Error::parse(
            lineno,
            "banner needs object, format, field and symmetry",
        ));
    };
    if object != "matrix" {
        return Err(Error::Unsupported(format!("object `{object}`")));
    }
    if format != "coordinate" {
        return Err(Error::Unsupported(format!(
            "format `{format}` (only coordinate is read)"
        )));
    }
    let field = match field.as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(Error::Unsupported(format!("field `{other}`"))),
    };
    let symmetric = match symmetry.as_str() {
        "symmetric" => true,
        "general" => false,
        other => return Err(Error::Unsupported(format!("symmetry `{other}`"))),
    };
    Ok((field, symmetric))
}

/// Writes the lower triangle as a `coordinate real symmetric` file.
///
/// Values use Rust's shortest round-trip formatting, so reloading gives
/// bitwise identical CSR arrays.
pub fn write_matrix_market(a: &SparseSymMatrix, writer: impl Write) -> Result<()> {
    let mut w = BufWriter::new(writer);
    let lower: Vec<(usize, usize, f64)> = (0..a.n())
        .flat_map(|i| {
            a.row(i)
                .filter(move |&(j, _)| j <= i)
                .map(move |(j, v)| (i, j, v))
        })
        .collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {v:?}", i + 1, j + 1)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a dense block in `array real general` format (column-major).
pub fn write_dense_array(block: &DenseBlock, writer: impl Write) -> Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "%%MatrixMarket matrix array real general")?;
    writeln!(w, "{} {}", block.nrows(), block.ncols())?;
    for v in block.as_slice() {
        writeln!(w, "{v:?}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file produced by [`write_dense_array`].
pub fn read_dense_array(reader: impl BufRead) -> Result<DenseBlock> {
    let mut values = Vec::new();
    let mut dims: Option<(usize, usize)> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if lineno == 1 {
            let banner = line.to_ascii_lowercase();
            if !banner.starts_with("%%matrixmarket matrix array real") {
                return Err(Error::parse(lineno, "expected `array real` banner"));
            }
            continue;
        }
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        if dims.is_none() {
            let d: Vec<usize> = t
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(lineno, format!("bad size line: {e}")))?;
            let &[r, c] = d.as_slice() else {
                return Err(Error::parse(lineno, "size line needs `rows cols`"));
            };
            dims = Some((r, c));
            continue;
        }
        values.push(
            t.parse::<f64>()
                .map_err(|_| Error::parse(lineno, format!("bad value `{t}`")))?,
        );
    }
    let (r, c) = dims.ok_or_else(|| Error::parse(1, "missing size line"))?;
    DenseBlock::from_col_major(r, c, values)
}
