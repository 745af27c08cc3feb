use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::operator::DenseMatrix;

const ARRAY_HEADER: &str = "%%MatrixMarket matrix array real general";

/// Writes `m` in array format (column-major values, shortest round-trip
/// decimal form).
pub fn write_matrix_market<W: Write>(mut w: W, m: &DenseMatrix) -> Result<()> {
    writeln!(w, "{ARRAY_HEADER}")?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for c in 0..m.cols() {
        for r in 0..m.rows() {
            writeln!(w, "{:e}", m[(r, c)])?;
        }
    }
    Ok(())
}

pub fn write_matrix_file(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_matrix_market(&mut w, m)?;
    w.flush()?;
    Ok(())
}

/// Writes `v` as an `n x 1` array.
pub fn write_vector_file(path: &Path, v: &[f64]) -> Result<()> {
    let m = DenseMatrix::from_row_major(v.len(), 1, v.to_vec())?;
    write_matrix_file(path, &m)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[derive(PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Reads a real Matrix Market file in array or coordinate format
/// (`real`, `integer` or `pattern`; `general`, `symmetric` or
/// `skew-symmetric`).
pub fn read_matrix_market<R: Read>(r: R) -> Result<DenseMatrix> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(parse_err(1, format!("bad header '{header}'")));
    }
    let coordinate = match fields[2].as_str() {
        "array" => false,
        "coordinate" => true,
        other => return Err(parse_err(1, format!("unsupported format '{other}'"))),
    };
    let pattern = match fields[3].as_str() {
        "real" | "integer" | "double" => false,
        "pattern" if coordinate => true,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match fields[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut data = lines.filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        Ok(s) => Some(Ok((i + 1, s))),
        Err(e) => Some(Err(Error::from(e))),
    });

    let (size_line, size) = data.next().ok_or_else(|| parse_err(2, "missing size line"))??;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| parse_err(size_line, format!("bad integer '{t}'")))
        })
        .collect::<Result<_>>()?;
    let parse_f = |line: usize, t: &str| -> Result<f64> {
        t.parse::<f64>()
            .map_err(|_| parse_err(line, format!("bad number '{t}'")))
    };

    let place = |m: &mut DenseMatrix, r: usize, c: usize, v: f64, line: usize| -> Result<()> {
        if r >= m.rows() || c >= m.cols() {
            return Err(parse_err(
                line,
                format!("entry ({}, {}) out of range", r + 1, c + 1),
            ));
        }
        m[(r, c)] = v;
        match symmetry {
            Symmetry::General => {}
            Symmetry::Symmetric if r != c => m[(c, r)] = v,
            Symmetry::SkewSymmetric if r != c => m[(c, r)] = -v,
            _ => {}
        }
        Ok(())
    };

    if coordinate {
        if dims.len() != 3 {
            return Err(parse_err(size_line, "coordinate size line needs rows cols nnz"));
        }
        let mut m = DenseMatrix::zeros(dims[0], dims[1]);
        let mut count = 0;
        for entry in data {
            let (line, s) = entry?;
            let t: Vec<&str> = s.split_whitespace().collect();
            let need = if pattern { 2 } else { 3 };
            if t.len() != need {
                return Err(parse_err(line, format!("expected {need} fields")));
            }
            let r: usize = t[0].parse().map_err(|_| parse_err(line, "bad row index"))?;
            let c: usize = t[1].parse().map_err(|_| parse_err(line, "bad column index"))?;
            if r == 0 || c == 0 {
                return Err(parse_err(line, "indices are 1-based"));
            }
            let v = if pattern { 1.0 } else { parse_f(line, t[2])? };
            place(&mut m, r - 1, c - 1, v, line)?;
            count += 1;
        }
        if count != dims[2] {
            return Err(parse_err(
                size_line,
                format!("expected {} entries, found {count}", dims[2]),
            ));
        }
        Ok(m)
    } else {
        if dims.len() != 2 {
            return Err(parse_err(size_line, "array size line needs rows cols"));
        }
        let (rows, cols) = (dims[0], dims[1]);
        let mut m = DenseMatrix::zeros(rows, cols);
        // Column-major; symmetric variants list the lower triangle only.
        let mut slots = Vec::new();
        for c in 0..cols {
            let start = if symmetry == Symmetry::General {
                0
            } else if symmetry == Symmetry::Symmetric {
                c
            } else {
                c + 1
            };
            for r in start..rows {
                slots.push((r, c));
            }
        }
        let mut k = 0;
        for entry in data {
            let (line, s) = entry?;
            for t in s.split_whitespace() {
                let &(r, c) = slots
                    .get(k)
                    .ok_or_else(|| parse_err(line, "more values than the size line declares"))?;
                place(&mut m, r, c, parse_f(line, t)?, line)?;
                k += 1;
            }
        }
        if k != slots.len() {
            return Err(parse_err(
                size_line,
                format!("expected {} values, found {k}", slots.len()),
            ));
        }
        Ok(m)
    }
}

pub fn read_matrix_file(path: &Path) -> Result<DenseMatrix> {
    read_matrix_market(std::fs::File::open(path)?)
}
