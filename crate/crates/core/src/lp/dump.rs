//! Plain-text LP dump used for debugging.
//!
//! ```text
//! max c_1 c_2 ... c_d
//! lb l_1 l_2 ... l_d          (each entry a number or `free`)
//! g_11 ... g_1d <= h_1
//! ...
//! ```
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use super::LpProblem;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub fn write_lp_dump(p: &LpProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# lp vars={} constraints={}",
        p.num_vars(),
        p.num_constraints()
    );
    out.push_str("max");
    for c in &p.objective {
        let _ = write!(out, " {c:?}");
    }
    out.push_str("\nlb");
    for l in &p.lower_bounds {
        match l {
            Some(v) => {
                let _ = write!(out, " {v:?}");
            }
            None => out.push_str(" free"),
        }
    }
    out.push('\n');
    for (row, h) in p.constraints.row_iter().zip(&p.rhs) {
        for g in row {
            let _ = write!(out, "{g:?} ");
        }
        let _ = writeln!(out, "<= {h:?}");
    }
    out
}

fn num(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|e| Error::Parse {
        line,
        message: format!("`{tok}`: {e}"),
    })
}

pub fn parse_lp_dump(text: &str) -> Result<LpProblem> {
    let mut objective = None;
    let mut lower = None;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let mut toks = s.split_whitespace();
        match toks.clone().next() {
            Some("max") => {
                toks.next();
                objective = Some(toks.map(|t| num(t, line)).collect::<Result<Vec<_>>>()?);
            }
            Some("lb") => {
                toks.next();
                lower = Some(
                    toks.map(|t| {
                        if t == "free" {
                            Ok(None)
                        } else {
                            num(t, line).map(Some)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
                );
            }
            _ => {
                let (lhs, h) = s.split_once("<=").ok_or(Error::Parse {
                    line,
                    message: "constraint line needs `<=`".into(),
                })?;
                rows.push(
                    lhs.split_whitespace()
                        .map(|t| num(t, line))
                        .collect::<Result<Vec<_>>>()?,
                );
                rhs.push(num(h.trim(), line)?);
            }
        }
    }
    let objective = objective.ok_or_else(|| Error::MissingField("max".into()))?;
    let lower_bounds = lower.ok_or_else(|| Error::MissingField("lb".into()))?;
    let constraints = if rows.is_empty() {
        DenseMatrix::zeros(0, objective.len())
    } else {
        DenseMatrix::from_rows(&rows)?
    };
    LpProblem::new(objective, constraints, rhs, lower_bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trip() {
        let p = LpProblem::new(
            vec![1.0, -0.1],
            DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-2.0, -1.0]]).unwrap(),
            vec![2.0, 2.0],
            vec![None, Some(0.0)],
        )
        .unwrap();
        let text = write_lp_dump(&p);
        assert!(text.contains("lb free 0.0"));
        assert_eq!(parse_lp_dump(&text).unwrap(), p);
    }

    #[test]
    fn parse_errors_report_line() {
        let err = parse_lp_dump("max 1\nlb free\n1 <= x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert!(matches!(
            parse_lp_dump("lb free\n").unwrap_err(),
            Error::MissingField(_)
        ));
    }
}
