//! MatrixMarket reading and writing.
//!
//! Reads `coordinate` and `array` formats with `real`, `integer` or `pattern`
//! fields and `general` or `symmetric` storage. Writes `coordinate real general`
//! with shortest round-trip float formatting, so write-then-read is exact.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context};

use crate::linalg::matrix::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Coordinate,
    Array,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> anyhow::Result<(Format, Field, Symmetry)> {
    let tokens: Vec<String> = line.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        bail!("line 1: expected '%%MatrixMarket matrix <format> <field> <symmetry>', got '{line}'");
    }
    let format = match tokens[2].as_str() {
        "coordinate" => Format::Coordinate,
        "array" => Format::Array,
        other => bail!("line 1: unsupported format '{other}'"),
    };
    let field = match tokens[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "pattern" => Field::Pattern,
        other => bail!("line 1: unsupported field '{other}'"),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        other => bail!("line 1: unsupported symmetry '{other}'"),
    };
    if format == Format::Array && field == Field::Pattern {
        bail!("line 1: 'array pattern' is not a valid combination");
    }
    Ok((format, field, symmetry))
}

fn parse_usize(tok: &str, lineno: usize, what: &str) -> anyhow::Result<usize> {
    tok.parse()
        .with_context(|| format!("line {lineno}: invalid {what} '{tok}'"))
}

fn parse_value(tok: &str, field: Field, lineno: usize) -> anyhow::Result<f64> {
    let v = match field {
        Field::Integer => tok
            .parse::<i64>()
            .map(|x| x as f64)
            .with_context(|| format!("line {lineno}: invalid integer '{tok}'"))?,
        _ => tok
            .parse::<f64>()
            .with_context(|| format!("line {lineno}: invalid value '{tok}'"))?,
    };
    if !v.is_finite() {
        bail!("line {lineno}: non-finite value '{tok}'");
    }
    Ok(v)
}

/// Parses MatrixMarket text into a dense matrix. Duplicate coordinate entries are summed.
pub fn parse_mtx(text: &str) -> anyhow::Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| anyhow!("empty MatrixMarket input"))?;
    let (format, field, symmetry) = parse_header(header)?;
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_line, size) = body.next().ok_or_else(|| anyhow!("missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let (rows, cols) = match (format, dims.as_slice()) {
        (Format::Coordinate, [r, c, _]) | (Format::Array, [r, c]) => (
            parse_usize(r, size_line, "row count")?,
            parse_usize(c, size_line, "column count")?,
        ),
        _ => bail!("line {size_line}: malformed size line '{size}'"),
    };
    if rows == 0 || cols == 0 {
        bail!("line {size_line}: matrix must be non-empty, got {rows}x{cols}");
    }
    if symmetry == Symmetry::Symmetric && rows != cols {
        bail!("line {size_line}: symmetric storage requires a square matrix, got {rows}x{cols}");
    }
    let mut data = vec![0.0; rows * cols];

    match format {
        Format::Coordinate => {
            let nnz = parse_usize(dims[2], size_line, "entry count")?;
            let mut seen = 0;
            for (lineno, line) in body {
                let t: Vec<&str> = line.split_whitespace().collect();
                let want = if field == Field::Pattern { 2 } else { 3 };
                if t.len() != want {
                    bail!("line {lineno}: expected {want} tokens, got '{line}'");
                }
                let i = parse_usize(t[0], lineno, "row index")?;
                let j = parse_usize(t[1], lineno, "column index")?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    bail!("line {lineno}: index ({i}, {j}) outside 1..={rows} x 1..={cols}");
                }
                let v = if field == Field::Pattern {
                    1.0
                } else {
                    parse_value(t[2], field, lineno)?
                };
                let (i, j) = (i - 1, j - 1);
                data[i * cols + j] += v;
                if symmetry == Symmetry::Symmetric && i != j {
                    data[j * cols + i] += v;
                }
                seen += 1;
            }
            if seen != nnz {
                bail!("size line declares {nnz} entries, found {seen}");
            }
        }
        Format::Array => {
            // column-major; symmetric storage lists the lower triangle only
            let mut slots = Vec::new();
            for j in 0..cols {
                let start = if symmetry == Symmetry::Symmetric { j } else { 0 };
                for i in start..rows {
                    slots.push((i, j));
                }
            }
            let mut k = 0;
            for (lineno, line) in body {
                for tok in line.split_whitespace() {
                    let &(i, j) = slots
                        .get(k)
                        .ok_or_else(|| anyhow!("line {lineno}: more values than the declared size"))?;
                    let v = parse_value(tok, field, lineno)?;
                    data[i * cols + j] = v;
                    if symmetry == Symmetry::Symmetric {
                        data[j * cols + i] = v;
                    }
                    k += 1;
                }
            }
            if k != slots.len() {
                bail!("expected {} values, found {k}", slots.len());
            }
        }
    }
    Ok(DenseMatrix::new(rows, cols, data)?)
}

/// Reads a MatrixMarket file.
pub fn read_mtx(path: &Path) -> anyhow::Result<DenseMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_mtx(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Formats a matrix as `coordinate real general`, listing only nonzero entries.
pub fn format_mtx(m: &DenseMatrix) -> String {
    let nnz = m.as_slice().iter().filter(|&&x| x != 0.0).count();
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), nnz);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{} {} {:?}", i + 1, j + 1, v);
            }
        }
    }
    out
}

/// Writes a matrix as `coordinate real general`.
pub fn write_mtx(path: &Path, m: &DenseMatrix) -> anyhow::Result<()> {
    std::fs::write(path, format_mtx(m)).with_context(|| format!("writing {}", path.display()))
}
