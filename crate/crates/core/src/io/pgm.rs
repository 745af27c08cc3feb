use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const MAXVAL: u16 = 65535;

/// A decoded 16-bit grayscale image.
#[derive(Clone, Debug, PartialEq)]
pub struct PgmImage {
    pub rows: usize,
    pub cols: usize,
    /// Row-major samples.
    pub samples: Vec<u16>,
}

/// Maps `values` (row-major `rows x cols`) linearly from `[min, max]` onto
/// `0..=65535` and writes a binary P5 image with big-endian samples.
/// Returns `(min, max)`. A constant image maps to zeros.
pub fn write_pgm<W: Write>(mut w: W, values: &[f64], rows: usize, cols: usize) -> Result<(f64, f64)> {
    if values.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            context: "write_pgm",
            expected: rows * cols,
            found: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("write_pgm"));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (min, max) = if values.is_empty() { (0.0, 0.0) } else { (min, max) };
    write!(w, "P5\n{cols} {rows}\n{MAXVAL}\n")?;
    let span = max - min;
    let mut bytes = Vec::with_capacity(values.len() * 2);
    for v in values {
        let s = if span > 0.0 {
            ((v - min) / span * MAXVAL as f64)
                .round()
                .clamp(0.0, MAXVAL as f64) as u16
        } else {
            0
        };
        bytes.extend_from_slice(&s.to_be_bytes());
    }
    w.write_all(&bytes)?;
    Ok((min, max))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".range");
    PathBuf::from(s)
}

/// Writes `path` and a sidecar `path.range` holding `min` and `max` so the
/// mapping can be inverted.
pub fn write_pgm_file(path: &Path, values: &[f64], rows: usize, cols: usize) -> Result<(f64, f64)> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let (min, max) = write_pgm(&mut w, values, rows, cols)?;
    w.flush()?;
    std::fs::write(sidecar(path), format!("min {min:e}\nmax {max:e}\n"))?;
    Ok((min, max))
}

fn bad(message: &str) -> Error {
    Error::Parse {
        line: 0,
        message: format!("pgm: {message}"),
    }
}

pub fn read_pgm<R: Read>(mut r: R) -> Result<PgmImage> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < buf.len() && buf[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < buf.len() && buf[pos] == b'#' {
                while pos < buf.len() && buf[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < buf.len() && !buf[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        Ok(String::from_utf8_lossy(&buf[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(bad("not a binary PGM (P5)"));
    }
    let cols: usize = token()?.parse().map_err(|_| bad("bad width"))?;
    let rows: usize = token()?.parse().map_err(|_| bad("bad height"))?;
    let maxval: u32 = token()?.parse().map_err(|_| bad("bad maxval"))?;
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval out of range"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let width = if maxval > 255 { 2 } else { 1 };
    let need = rows * cols * width;
    if buf.len() < pos + need {
        return Err(bad("truncated raster"));
    }
    let raster = &buf[pos..pos + need];
    let samples = if width == 2 {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        raster.iter().map(|&b| b as u16).collect()
    };
    Ok(PgmImage { rows, cols, samples })
}

pub fn read_pgm_file(path: &Path) -> Result<PgmImage> {
    read_pgm(std::fs::File::open(path)?)
}

/// Reads `path` and its sidecar and maps the samples back to `[min, max]`.
pub fn read_pgm_scaled(path: &Path) -> Result<(PgmImage, Vec<f64>)> {
    let img = read_pgm_file(path)?;
    let text = std::fs::read_to_string(sidecar(path))?;
    let mut min = None;
    let mut max = None;
    for (i, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let (key, val) = (it.next(), it.next());
        let parse = |v: Option<&str>| {
            v.and_then(|s| s.parse::<f64>().ok()).ok_or(Error::Parse {
                line: i + 1,
                message: "bad range value".into(),
            })
        };
        match key {
            Some("min") => min = Some(parse(val)?),
            Some("max") => max = Some(parse(val)?),
            _ => {}
        }
    }
    let (min, max) = min.zip(max).ok_or_else(|| bad("sidecar lacks min/max"))?;
    let values = img
        .samples
        .iter()
        .map(|&s| min + (max - min) * s as f64 / MAXVAL as f64)
        .collect();
    Ok((img, values))
}
