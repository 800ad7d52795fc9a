//! Matrix Market exchange format.
//!
//! Coordinate and array formats are read; real and integer fields are
//! promoted to complex, pattern files are refused. Symmetric, Hermitian and
//! skew-symmetric storage (one triangle in the file) is expanded to full CSR.
//! Writing always produces coordinate complex format, `symmetric` (lower
//! triangle) when the matrix is exactly complex symmetric and `general`
//! otherwise, with 17 significant digits so a read-back is bit exact.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::la::{BlockVector, LaError, Storage, SymMatrix, Symmetry};

#[derive(Debug, Error)]
pub enum MmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed banner: {0}")]
    Banner(String),
    #[error("pattern matrices carry no values and cannot be solved")]
    PatternField,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("size line declares {expected} entries but {found} were read")]
    EntryCount { expected: usize, found: usize },
    #[error("line {line}: index ({row}, {col}) outside a {rows}x{cols} matrix")]
    IndexOutOfBounds {
        line: usize,
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col}) (1-based)")]
    Duplicate { row: usize, col: usize },
    #[error("expected a square matrix, found {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("unsupported layout: {0}")]
    Unsupported(String),
}

impl From<LaError> for MmError {
    fn from(e: LaError) -> Self {
        match e {
            LaError::DuplicateEntry { row, col } => MmError::Duplicate {
                row: row + 1,
                col: col + 1,
            },
            other => MmError::Unsupported(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmField {
    Real,
    Complex,
    Integer,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmSymmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// Parsed `%%MatrixMarket matrix <format> <field> <symmetry>` banner. The
/// object is always `matrix`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixMarketHeader {
    pub format: MmFormat,
    pub field: MmField,
    pub symmetry: MmSymmetry,
}

impl MatrixMarketHeader {
    pub fn parse(line: &str) -> Result<Self, MmError> {
        let tokens: Vec<String> = line
            .split_whitespace()
            .map(str::to_ascii_lowercase)
            .collect();
        if tokens.len() != 5 {
            return Err(MmError::Banner(format!(
                "expected 5 tokens, found {}",
                tokens.len()
            )));
        }
        if tokens[0] != "%%matrixmarket" {
            return Err(MmError::Banner(format!(
                "expected %%MatrixMarket, found {:?}",
                tokens[0]
            )));
        }
        if tokens[1] != "matrix" {
            return Err(MmError::Banner(format!(
                "unsupported object {:?}",
                tokens[1]
            )));
        }
        let format = match tokens[2].as_str() {
            "coordinate" => MmFormat::Coordinate,
            "array" => MmFormat::Array,
            other => return Err(MmError::Banner(format!("unknown format {other:?}"))),
        };
        let field = match tokens[3].as_str() {
            "real" => MmField::Real,
            "complex" => MmField::Complex,
            "integer" => MmField::Integer,
            "pattern" => MmField::Pattern,
            other => return Err(MmError::Banner(format!("unknown field {other:?}"))),
        };
        let symmetry = match tokens[4].as_str() {
            "general" => MmSymmetry::General,
            "symmetric" => MmSymmetry::Symmetric,
            "skew-symmetric" => MmSymmetry::SkewSymmetric,
            "hermitian" => MmSymmetry::Hermitian,
            other => return Err(MmError::Banner(format!("unknown symmetry {other:?}"))),
        };
        Ok(Self {
            format,
            field,
            symmetry,
        })
    }

    fn symmetry_tag(&self) -> Symmetry {
        match self.symmetry {
            MmSymmetry::General => Symmetry::General,
            MmSymmetry::Symmetric => Symmetry::ComplexSymmetric,
            MmSymmetry::SkewSymmetric => Symmetry::SkewSymmetric,
            MmSymmetry::Hermitian => Symmetry::Hermitian,
        }
    }
}

/// Data lines of a Matrix Market body with their 1-based line numbers,
/// comments and blank lines skipped.
struct Body<R> {
    lines: io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Body<R> {
    fn next_data(&mut self) -> Result<Option<(usize, String)>, MmError> {
        for line in self.lines.by_ref() {
            self.line_no += 1;
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('%') {
                continue;
            }
            return Ok(Some((self.line_no, t.to_string())));
        }
        Ok(None)
    }
}

fn parse_num<T: std::str::FromStr>(
    tok: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, MmError> {
    let tok = tok.ok_or_else(|| MmError::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| MmError::Parse {
        line,
        msg: format!("cannot parse {what} from {tok:?}"),
    })
}

fn parse_value<'a>(
    toks: &mut impl Iterator<Item = &'a str>,
    field: MmField,
    line: usize,
) -> Result<Complex64, MmError> {
    let re: f64 = parse_num(toks.next(), line, "real part")?;
    let im: f64 = match field {
        MmField::Complex => parse_num(toks.next(), line, "imaginary part")?,
        _ => 0.0,
    };
    if toks.next().is_some() {
        return Err(MmError::Parse {
            line,
            msg: "trailing tokens".into(),
        });
    }
    Ok(Complex64::new(re, im))
}

/// Raw contents of a file: header, shape and 0-based `(row, col, value)`
/// entries exactly as listed (no symmetric expansion yet).
struct RawMatrix {
    header: MatrixMarketHeader,
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

fn read_raw<R: BufRead>(reader: R) -> Result<RawMatrix, MmError> {
    let mut lines = reader.lines();
    let banner = lines
        .next()
        .ok_or_else(|| MmError::Banner("empty input".into()))??;
    let header = MatrixMarketHeader::parse(&banner)?;
    if header.field == MmField::Pattern {
        return Err(MmError::PatternField);
    }
    let mut body = Body { lines, line_no: 1 };
    let (line, size) = body.next_data()?.ok_or_else(|| MmError::Parse {
        line: 1,
        msg: "missing size line".into(),
    })?;
    let mut toks = size.split_whitespace();
    let rows: usize = parse_num(toks.next(), line, "row count")?;
    let cols: usize = parse_num(toks.next(), line, "column count")?;

    let mut entries = Vec::new();
    match header.format {
        MmFormat::Coordinate => {
            let nnz: usize = parse_num(toks.next(), line, "entry count")?;
            entries.reserve(nnz);
            while let Some((line, text)) = body.next_data()? {
                if entries.len() == nnz {
                    return Err(MmError::EntryCount {
                        expected: nnz,
                        found: nnz + 1,
                    });
                }
                let mut toks = text.split_whitespace();
                let i: usize = parse_num(toks.next(), line, "row index")?;
                let j: usize = parse_num(toks.next(), line, "column index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(MmError::IndexOutOfBounds {
                        line,
                        row: i,
                        col: j,
                        rows,
                        cols,
                    });
                }
                let v = parse_value(&mut toks, header.field, line)?;
                entries.push((i - 1, j - 1, v));
            }
            if entries.len() != nnz {
                return Err(MmError::EntryCount {
                    expected: nnz,
                    found: entries.len(),
                });
            }
        }
        MmFormat::Array => {
            // column-major; symmetric kinds list only the lower triangle
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = match header.symmetry {
                    MmSymmetry::General => 0,
                    MmSymmetry::SkewSymmetric => j + 1,
                    _ => j,
                };
                slots.extend((start..rows).map(|i| (i, j)));
            }
            let mut k = 0;
            while let Some((line, text)) = body.next_data()? {
                if k == slots.len() {
                    return Err(MmError::EntryCount {
                        expected: slots.len(),
                        found: k + 1,
                    });
                }
                let v = parse_value(&mut text.split_whitespace(), header.field, line)?;
                entries.push((slots[k].0, slots[k].1, v));
                k += 1;
            }
            if k != slots.len() {
                return Err(MmError::EntryCount {
                    expected: slots.len(),
                    found: k,
                });
            }
        }
    }
    if header.symmetry != MmSymmetry::General && rows != cols {
        return Err(MmError::NotSquare { rows, cols });
    }
    Ok(RawMatrix {
        header,
        rows,
        cols,
        entries,
    })
}

fn expand(
    header: &MatrixMarketHeader,
    entries: Vec<(usize, usize, Complex64)>,
) -> Vec<(usize, usize, Complex64)> {
    let mut out = Vec::with_capacity(2 * entries.len());
    for (i, j, v) in entries {
        out.push((i, j, v));
        if i != j {
            match header.symmetry {
                MmSymmetry::General => {}
                MmSymmetry::Symmetric => out.push((j, i, v)),
                MmSymmetry::SkewSymmetric => out.push((j, i, -v)),
                MmSymmetry::Hermitian => out.push((j, i, v.conj())),
            }
        }
    }
    out
}

/// Reads a square matrix. Coordinate files become CSR, array files dense.
pub fn read_matrix_market<R: BufRead>(
    reader: R,
) -> Result<(MatrixMarketHeader, SymMatrix), MmError> {
    let raw = read_raw(reader)?;
    if raw.rows != raw.cols {
        return Err(MmError::NotSquare {
            rows: raw.rows,
            cols: raw.cols,
        });
    }
    let n = raw.rows;
    let tag = raw.header.symmetry_tag();
    let full = expand(&raw.header, raw.entries);
    let m = match raw.header.format {
        MmFormat::Coordinate => SymMatrix::from_triplets(n, full, tag)?,
        MmFormat::Array => {
            let mut values = vec![Complex64::new(0.0, 0.0); n * n];
            for (i, j, v) in full {
                values[i * n + j] = v;
            }
            SymMatrix::from_dense_row_major(n, values, tag)?
        }
    };
    Ok((raw.header, m))
}

pub fn read_matrix_market_file(
    path: impl AsRef<Path>,
) -> Result<(MatrixMarketHeader, SymMatrix), MmError> {
    read_matrix_market(BufReader::new(File::open(path)?))
}

fn fmt_value(v: Complex64) -> String {
    format!("{:.16e} {:.16e}", v.re, v.im)
}

/// Writes `m` in coordinate complex format, lower triangle only when the
/// matrix is exactly complex symmetric.
pub fn write_matrix_market<W: Write>(m: &SymMatrix, mut w: W) -> io::Result<()> {
    let symmetric = m.check_complex_symmetric();
    let dense = matches!(m.storage(), Storage::Dense(_));
    let entries: Vec<_> = m
        .entries()
        .into_iter()
        .filter(|&(i, j, v)| !(symmetric && j > i) && !(dense && v == Complex64::new(0.0, 0.0)))
        .collect();
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate complex {kind}")?;
    writeln!(w, "{} {} {}", m.n(), m.n(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {}", i + 1, j + 1, fmt_value(v))?;
    }
    w.flush()
}

/// Reads an `n x p` block (e.g. a right-hand side) stored in array or
/// coordinate general format.
pub fn read_block<R: BufRead>(reader: R) -> Result<BlockVector, MmError> {
    let raw = read_raw(reader)?;
    if raw.header.symmetry != MmSymmetry::General {
        return Err(MmError::Unsupported(
            "right-hand side blocks must be general".into(),
        ));
    }
    let mut seen = vec![false; raw.rows * raw.cols];
    let mut data = vec![Complex64::new(0.0, 0.0); raw.rows * raw.cols];
    for (i, j, v) in raw.entries {
        let k = j * raw.rows + i;
        if seen[k] {
            return Err(MmError::Duplicate {
                row: i + 1,
                col: j + 1,
            });
        }
        seen[k] = true;
        data[k] = v;
    }
    Ok(BlockVector::from_col_major(raw.rows, raw.cols, data)?)
}

pub fn read_block_file(path: impl AsRef<Path>) -> Result<BlockVector, MmError> {
    read_block(BufReader::new(File::open(path)?))
}

/// Writes a block in array complex general format.
pub fn write_block<W: Write>(b: &BlockVector, mut w: W) -> io::Result<()> {
    writeln!(w, "%%MatrixMarket matrix array complex general")?;
    writeln!(w, "{} {}", b.n(), b.p())?;
    for z in b.as_slice() {
        writeln!(w, "{}", fmt_value(*z))?;
    }
    w.flush()
}
