//! Matrix Market coordinate format, restricted to Hermitian input.
//!
//! Only the `symmetric` and `hermitian` qualifiers are accepted: with a
//! `general` file the Hermitian structure could not be certified, so it is
//! rejected. The stored triangle is expanded into full storage.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sparse::HermitianSparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub field: Field,
    pub symmetry: Symmetry,
}

/// A matrix read from a file whose field is only known at runtime.
#[derive(Debug, Clone)]
pub enum AnyMatrix {
    Real(HermitianSparseMatrix<f64>),
    Complex(HermitianSparseMatrix<Complex64>),
}

fn mm_err(line: usize, message: impl Into<String>) -> Error {
    Error::MatrixMarket {
        line,
        message: message.into(),
    }
}

pub fn parse_header(line: &str) -> Result<Header> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(mm_err(1, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    if tokens[1] != "matrix" {
        return Err(mm_err(1, format!("unsupported object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(mm_err(1, format!("unsupported format '{}'", tokens[2])));
    }
    let field = match tokens[3].as_str() {
        "real" | "integer" => Field::Real,
        "complex" => Field::Complex,
        other => return Err(mm_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "general" => {
            return Err(mm_err(
                1,
                "'general' matrices are rejected: Hermitian structure cannot be certified",
            ))
        }
        other => return Err(mm_err(1, format!("unsupported symmetry '{other}'"))),
    };
    Ok(Header { field, symmetry })
}

struct RawEntries {
    header: Header,
    n: usize,
    entries: Vec<(usize, usize, f64, f64)>,
}

fn read_raw<R: BufRead>(reader: R) -> Result<RawEntries> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => parse_header(&l?)?,
        None => return Err(mm_err(1, "empty input")),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(mm_err(lineno, "size line must be 'rows cols nnz'"));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| mm_err(lineno, format!("invalid integer '{s}'")))
                };
                let (rows, cols, nnz) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if rows != cols {
                    return Err(mm_err(lineno, format!("matrix is not square ({rows}x{cols})")));
                }
                if rows == 0 {
                    return Err(mm_err(lineno, "matrix dimension must be positive"));
                }
                size = Some((rows, nnz));
                entries.reserve(nnz);
            }
            Some((n, _)) => {
                let want = match header.field {
                    Field::Real => 3,
                    Field::Complex => 4,
                };
                if fields.len() != want {
                    return Err(mm_err(lineno, format!("expected {want} fields per entry")));
                }
                let idx = |s: &str| -> Result<usize> {
                    let v = s
                        .parse::<usize>()
                        .map_err(|_| mm_err(lineno, format!("invalid index '{s}'")))?;
                    if v == 0 || v > n {
                        return Err(mm_err(lineno, format!("index {v} out of range 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let num = |s: &str| -> Result<f64> {
                    s.parse::<f64>()
                        .map_err(|_| mm_err(lineno, format!("invalid number '{s}'")))
                };
                let i = idx(fields[0])?;
                let j = idx(fields[1])?;
                let re = num(fields[2])?;
                let im = if want == 4 { num(fields[3])? } else { 0.0 };
                entries.push((i, j, re, im));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| mm_err(1, "missing size line"))?;
    if entries.len() != nnz {
        return Err(mm_err(
            0,
            format!("size line declares {nnz} entries, found {}", entries.len()),
        ));
    }
    Ok(RawEntries { header, n, entries })
}

fn expand<T: Scalar>(raw: RawEntries) -> Result<HermitianSparseMatrix<T>> {
    let mut triplets = Vec::with_capacity(2 * raw.entries.len());
    for (i, j, re, im) in raw.entries {
        let v = T::from_parts(re, im).ok_or_else(|| {
            mm_err(0, format!("entry ({}, {}) has an imaginary part", i + 1, j + 1))
        })?;
        triplets.push((i, j, v));
        if i != j {
            let mirror = match raw.header.symmetry {
                Symmetry::Hermitian => v.conj(),
                Symmetry::Symmetric => v,
            };
            triplets.push((j, i, mirror));
        }
    }
    let a = HermitianSparseMatrix::from_triplets(raw.n, triplets)?;
    a.check_positive_diagonal()?;
    Ok(a)
}

/// Reads a Hermitian matrix with a statically known scalar type. Reading a
/// complex file into `f64` fails if any entry has a nonzero imaginary part.
pub fn read_matrix_market<T: Scalar, R: BufRead>(reader: R) -> Result<HermitianSparseMatrix<T>> {
    expand(read_raw(reader)?)
}

/// Reads a Hermitian matrix, choosing the scalar type from the header.
pub fn read_matrix_market_any<R: BufRead>(reader: R) -> Result<AnyMatrix> {
    let raw = read_raw(reader)?;
    Ok(match raw.header.field {
        Field::Real => AnyMatrix::Real(expand(raw)?),
        Field::Complex => AnyMatrix::Complex(expand(raw)?),
    })
}

/// Writes the lower triangle with shortest round-trip number formatting.
pub fn write_matrix_market<T: Scalar, W: Write>(
    a: &HermitianSparseMatrix<T>,
    mut out: W,
) -> Result<()> {
    let lower: Vec<(usize, usize, T)> = (0..a.n())
        .flat_map(|i| a.row(i).filter(move |&(j, _)| j <= i).map(move |(j, v)| (i, j, v)))
        .collect();
    if T::IS_COMPLEX {
        writeln!(out, "%%MatrixMarket matrix coordinate complex hermitian")?;
    } else {
        writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    }
    writeln!(out, "{} {} {}", a.n(), a.n(), lower.len())?;
    for (i, j, v) in lower {
        if T::IS_COMPLEX {
            writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re(), v.im())?;
        } else {
            writeln!(out, "{} {} {:e}", i + 1, j + 1, v.re())?;
        }
    }
    Ok(())
}
