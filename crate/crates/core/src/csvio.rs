//! Headerless numeric CSV: one matrix row per line, shortest round-trip
//! decimal for each entry.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let s = line.trim();
        if s.is_empty() {
            continue;
        }
        let row = s
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: k + 1,
                    message: format!("`{}`: {e}", t.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: k + 1,
                    message: format!("expected {} columns, got {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "empty matrix".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

/// Accepts a single row or a single column.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let m = parse_matrix(text)?;
    if m.rows() == 1 || m.cols() == 1 {
        Ok(m.as_slice().to_vec())
    } else {
        Err(Error::Parse {
            line: 0,
            message: format!("expected a vector, got a {}x{} matrix", m.rows(), m.cols()),
        })
    }
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:?}");
        }
        out.push('\n');
    }
    out
}

/// One entry per line.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::new();
    for x in v {
        let _ = writeln!(out, "{x:?}");
    }
    out
}
