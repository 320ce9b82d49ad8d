//! Matrix and polynomial input.
//!
//! Matrices are JSON arrays of arrays. Entries may be JSON numbers of any
//! size or decimal strings; `serde_json` is built with exact number storage,
//! so nothing passes through floating point.

use std::path::Path;

use num_bigint::BigInt;
use serde_json::Value;
use shift_equiv_core::{IntMatrix, IntPoly};

use crate::CliError;

fn entry(v: &Value) -> Result<BigInt, CliError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        other => return Err(CliError::Usage(format!("matrix entry {other} is not an integer"))),
    };
    text.parse().map_err(|_| CliError::Usage(format!("matrix entry {text:?} is not an integer")))
}

pub fn matrix_from_value(v: &Value) -> Result<IntMatrix, CliError> {
    let rows = v.as_array().ok_or_else(|| CliError::Usage("a matrix must be an array of rows".into()))?;
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| CliError::Usage("each matrix row must be an array".into()))?
                .iter()
                .map(entry)
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!("matrix with {n} rows is not square")));
    }
    Ok(IntMatrix::new(n, n, rows.into_iter().flatten().collect()).expect("checked shape"))
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix, CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("cannot parse matrix {text:?}: {e}")))?;
    matrix_from_value(&v)
}

fn is_matrix(v: &Value) -> bool {
    v.as_array().is_some_and(|rows| rows.iter().all(|r| r.as_array().is_some_and(|r| r.iter().all(|x| !x.is_array()))))
}

/// A file holds one matrix, a list of matrices, or an object whose
/// `matrices` field (or `t1`, `t2`, … fields, in order) holds them.
pub fn matrices_from_file(path: &Path) -> Result<Vec<IntMatrix>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    match &v {
        Value::Array(items) if !is_matrix(&v) => items.iter().map(matrix_from_value).collect(),
        Value::Array(_) => Ok(vec![matrix_from_value(&v)?]),
        Value::Object(map) => {
            if let Some(list) = map.get("matrices") {
                let items = list.as_array().ok_or_else(|| CliError::Usage("\"matrices\" must be an array".into()))?;
                return items.iter().map(matrix_from_value).collect();
            }
            let mut out = Vec::new();
            for k in 1.. {
                match map.get(&format!("t{k}")) {
                    Some(m) => out.push(matrix_from_value(m)?),
                    None => break,
                }
            }
            if out.is_empty() {
                return Err(CliError::Usage(format!("{}: no \"matrices\" or \"t1\" field", path.display())));
            }
            Ok(out)
        }
        _ => Err(CliError::Usage(format!("{}: expected a matrix or a list of matrices", path.display()))),
    }
}

/// Inline matrices first, then those from files, in the order given.
pub fn collect_matrices(inline: &[String], files: &[std::path::PathBuf], expected: usize) -> Result<Vec<IntMatrix>, CliError> {
    let mut out: Vec<IntMatrix> = inline.iter().map(|s| parse_matrix(s)).collect::<Result<_, _>>()?;
    for f in files {
        out.extend(matrices_from_file(f)?);
    }
    if out.len() != expected {
        return Err(CliError::Usage(format!("expected {expected} matrices, got {}", out.len())));
    }
    Ok(out)
}

pub fn parse_poly(text: &str) -> Result<IntPoly, CliError> {
    // Accept the typographic minus sign as well.
    let cleaned = text.replace('−', "-");
    cleaned.parse().map_err(|e: shift_equiv_core::Error| CliError::Usage(e.to_string()))
}

pub fn parse_int(text: &str) -> Result<BigInt, CliError> {
    text.trim().replace('−', "-").parse().map_err(|_| CliError::Usage(format!("{text:?} is not an integer")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_entries_survive() {
        let m = parse_matrix("[[123456789012345678901234567890, \"-98765432109876543210\"], [0, 1]]").unwrap();
        assert_eq!(m[(0, 0)].to_string(), "123456789012345678901234567890");
        assert_eq!(m[(0, 1)].to_string(), "-98765432109876543210");
    }

    #[test]
    fn rejects_non_integers() {
        assert!(parse_matrix("[[1.5, 0], [0, 1]]").is_err());
        assert!(parse_matrix("[[1, 0], [0]]").is_err());
        assert!(parse_matrix("[[1, 0], [0, 1], [1, 1]]").is_err());
    }

    #[test]
    fn round_trip() {
        for text in ["[[1,0],[0,-1]]", "[[19,5],[4,1]]", "[[0,0,1],[1,0,0],[0,1,0]]"] {
            let m = parse_matrix(text).unwrap();
            assert_eq!(parse_matrix(&serde_json::to_string(&m).unwrap()).unwrap(), m);
            assert_eq!(parse_matrix(&m.to_string()).unwrap(), m);
        }
        for text in ["t^2-5", "t^2 - t - 1", "t^3-1", "2t^2+3*t-7"] {
            let p = parse_poly(text).unwrap();
            assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }
}
