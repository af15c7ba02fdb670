//! Matrix Market coordinate reader/writer for square complex matrices.
//!
//! Reads `real`/`complex`/`integer` fields with `general`, `symmetric` or
//! `hermitian` symmetry. Writes `complex hermitian` (lower triangle) when the
//! matrix is exactly Hermitian, `complex general` otherwise.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::sparse::SparseHermitian;
use crate::error::{Result, SbdError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

fn parse_err(line: usize, msg: impl Into<String>) -> SbdError {
    SbdError::Parse(format!("matrix market line {line}: {}", msg.into()))
}

pub fn read_mtx_str(text: &str) -> Result<SparseHermitian> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("bad banner {header:?}")));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, "only coordinate format is supported"));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(parse_err(1, format!("unsupported field {other}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unsupported symmetry {other}"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(parse_err(lineno, "expected `rows cols nnz`"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|e| parse_err(lineno, e.to_string()));
                let (r, c, n) = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
                if r != c {
                    return Err(parse_err(lineno, format!("matrix is {r}x{c}, not square")));
                }
                size = Some((r, c, n));
                triplets.reserve(n);
            }
            Some((rows, _, _)) => {
                let want = if field == Field::Complex { 4 } else { 3 };
                if parts.len() != want {
                    return Err(parse_err(lineno, format!("expected {want} columns")));
                }
                let idx = |s: &str| -> Result<usize> {
                    let v = s.parse::<usize>().map_err(|e| parse_err(lineno, e.to_string()))?;
                    if v == 0 || v > rows {
                        return Err(parse_err(lineno, format!("index {v} out of range")));
                    }
                    Ok(v - 1)
                };
                let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(lineno, e.to_string()));
                let (i, j) = (idx(parts[0])?, idx(parts[1])?);
                let v = match field {
                    Field::Real => Complex64::new(num(parts[2])?, 0.0),
                    Field::Complex => Complex64::new(num(parts[2])?, num(parts[3])?),
                };
                triplets.push((i, j, v));
                if i != j {
                    match symmetry {
                        Symmetry::General => {}
                        Symmetry::Symmetric => triplets.push((j, i, v)),
                        Symmetry::Hermitian => triplets.push((j, i, v.conj())),
                    }
                }
            }
        }
    }
    let (rows, _, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    let stored = match symmetry {
        Symmetry::General => triplets.len(),
        _ => triplets.iter().filter(|(i, j, _)| i >= j).count(),
    };
    if stored != nnz {
        return Err(SbdError::Parse(format!(
            "matrix market: header declares {nnz} entries, found {stored}"
        )));
    }
    SparseHermitian::from_triplets(rows, &triplets)
}

pub fn write_mtx_string(m: &SparseHermitian) -> String {
    let exact_hermitian = m.entries().all(|(i, j, v)| m.get(j, i) == v.conj());
    let entries: Vec<(usize, usize, Complex64)> = if exact_hermitian {
        m.entries().filter(|(i, j, _)| i >= j).collect()
    } else {
        m.entries().collect()
    };
    let mut out = String::new();
    let symmetry = if exact_hermitian { "hermitian" } else { "general" };
    let _ = writeln!(out, "%%MatrixMarket matrix coordinate complex {symmetry}");
    let _ = writeln!(out, "{} {} {}", m.dim(), m.dim(), entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im);
    }
    out
}

pub fn read_mtx(path: impl AsRef<Path>) -> Result<SparseHermitian> {
    read_mtx_str(&std::fs::read_to_string(path)?)
}

pub fn write_mtx(path: impl AsRef<Path>, m: &SparseHermitian) -> Result<()> {
    std::fs::write(path, write_mtx_string(m))?;
    Ok(())
}
