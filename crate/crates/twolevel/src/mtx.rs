//! Matrix Market `coordinate` files: real, integer or pattern fields,
//! general or symmetric storage.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;
use twolevel_core::sparse::{CooMatrix, Entry};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MtxError {
    #[error("missing %%MatrixMarket header")]
    MissingHeader,
    #[error("malformed header: {0:?}")]
    MalformedHeader(String),
    #[error("unsupported format {0:?}, only coordinate is read")]
    UnsupportedFormat(String),
    #[error("unsupported field {0:?}")]
    UnsupportedField(String),
    #[error("unsupported symmetry {0:?}")]
    UnsupportedSymmetry(String),
    #[error("missing size line")]
    MissingSize,
    #[error("line {line}: malformed size line {text:?}")]
    MalformedSize { line: usize, text: String },
    #[error("line {line}: malformed entry {text:?}")]
    MalformedEntry { line: usize, text: String },
    #[error("line {line}: index ({row},{col}) outside {n_rows}x{n_cols}")]
    IndexOutOfRange {
        line: usize,
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("line {line}: duplicate entry ({row},{col})")]
    DuplicateEntry { line: usize, row: usize, col: usize },
    #[error("expected {expected} entries, found {got}")]
    CountMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

/// Parses a Matrix Market document. Indices become 0-based, symmetric
/// storage is mirrored (diagonal kept once), pattern entries get 1.0 and
/// explicit zeros are kept.
pub fn parse_matrix_market(text: &str) -> Result<CooMatrix, MtxError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(MtxError::MissingHeader)?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.first().map(String::as_str) != Some("%%matrixmarket") {
        return Err(MtxError::MissingHeader);
    }
    if tokens.len() != 5 || tokens[1] != "matrix" {
        return Err(MtxError::MalformedHeader(header.to_string()));
    }
    if tokens[2] != "coordinate" {
        return Err(MtxError::UnsupportedFormat(tokens[2].clone()));
    }
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => return Err(MtxError::UnsupportedField(other.to_string())),
    };
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(MtxError::UnsupportedSymmetry(other.to_string())),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size_text) = body.next().ok_or(MtxError::MissingSize)?;
    let size: Vec<usize> = size_text
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| MtxError::MalformedSize {
            line: size_line,
            text: size_text.to_string(),
        })?;
    let [n_rows, n_cols, declared] = size[..] else {
        return Err(MtxError::MalformedSize {
            line: size_line,
            text: size_text.to_string(),
        });
    };

    let mut entries = Vec::with_capacity(if symmetric { 2 * declared } else { declared });
    let mut read = 0usize;
    let mut origin = Vec::with_capacity(entries.capacity());
    for (line, text) in body {
        read += 1;
        let (row, col, val) = parse_entry(text, field).ok_or_else(|| MtxError::MalformedEntry {
            line,
            text: text.to_string(),
        })?;
        if row == 0 || col == 0 || row > n_rows || col > n_cols {
            return Err(MtxError::IndexOutOfRange {
                line,
                row,
                col,
                n_rows,
                n_cols,
            });
        }
        entries.push(Entry::new(row - 1, col - 1, val));
        origin.push(line);
        if symmetric && row != col {
            entries.push(Entry::new(col - 1, row - 1, val));
            origin.push(line);
        }
    }
    if read != declared {
        return Err(MtxError::CountMismatch {
            expected: declared,
            got: read,
        });
    }

    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by_key(|&i| (entries[i].row, entries[i].col, origin[i]));
    for w in order.windows(2) {
        let (a, b) = (&entries[w[0]], &entries[w[1]]);
        if (a.row, a.col) == (b.row, b.col) {
            return Err(MtxError::DuplicateEntry {
                line: origin[w[1]],
                row: b.row + 1,
                col: b.col + 1,
            });
        }
    }
    Ok(CooMatrix::new(n_rows, n_cols, entries).expect("entries checked above"))
}

fn parse_entry(text: &str, field: Field) -> Option<(usize, usize, f64)> {
    let mut it = text.split_whitespace();
    let row = it.next()?.parse().ok()?;
    let col = it.next()?.parse().ok()?;
    let val = match field {
        Field::Pattern => 1.0,
        Field::Integer => it.next()?.parse::<i64>().ok()? as f64,
        Field::Real => it.next()?.parse::<f64>().ok()?,
    };
    it.next().is_none().then_some((row, col, val))
}

pub fn read_matrix_market(path: &Path) -> Result<CooMatrix, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_matrix_market(&text).map_err(|source| AppError::Mtx {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `m` as `coordinate real general`, entries in row-major order.
pub fn write_matrix_market(m: &CooMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz());
    for e in m.sorted_row_major() {
        let _ = writeln!(out, "{} {} {}", e.row + 1, e.col + 1, e.val);
    }
    out
}
