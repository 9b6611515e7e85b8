//! Plain-text snapshots of connection fields.
//!
//! ```text
//! vbstab-connection 1
//! <n> <r> <d>
//! <re> <im>        # n²·r² lines for a_x, then n²·r² lines for a_y
//! ```
//!
//! Sites are row-major (`iy * n + ix`), matrix entries row-major within a
//! site. Floats are written in shortest round-trip form, so reading a
//! written snapshot reproduces the field bit for bit.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use num_complex::Complex64;
use thiserror::Error;

use super::{ConnectionField, GridSpec, LatticeError, Mat, OneForm};

const MAGIC: &str = "vbstab-connection 1";

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> SnapshotError {
    SnapshotError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn write_connection<W: Write>(a: &ConnectionField, mut out: W) -> io::Result<()> {
    let g = a.grid();
    let mut buf = String::new();
    writeln!(buf, "{MAGIC}").unwrap();
    writeln!(buf, "{} {} {}", g.n(), g.rank(), g.degree()).unwrap();
    for comp in [a.ax(), a.ay()] {
        for m in comp {
            for i in 0..g.rank() {
                for j in 0..g.rank() {
                    let z = m[(i, j)];
                    writeln!(buf, "{:?} {:?}", z.re, z.im).unwrap();
                }
            }
        }
    }
    out.write_all(buf.as_bytes())
}

pub fn read_connection<R: BufRead>(input: R) -> Result<ConnectionField, SnapshotError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = || -> Result<(usize, String), SnapshotError> {
        match lines.next() {
            Some((i, l)) => Ok((i, l?)),
            None => Err(parse_err(0, "unexpected end of file")),
        }
    };

    let (ln, magic) = next()?;
    if magic.trim() != MAGIC {
        return Err(parse_err(ln, format!("expected header `{MAGIC}`")));
    }
    let (ln, header) = next()?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(ln, "expected `n r d`"));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(ln, "bad grid side"))?;
    let r: usize = fields[1].parse().map_err(|_| parse_err(ln, "bad rank"))?;
    let d: i64 = fields[2].parse().map_err(|_| parse_err(ln, "bad degree"))?;
    let grid = GridSpec::new(n, r, d)?;

    let mut read_component = || -> Result<Vec<Mat>, SnapshotError> {
        let mut comp = Vec::with_capacity(grid.sites());
        for _ in 0..grid.sites() {
            let mut m = Mat::zeros(r, r);
            for i in 0..r {
                for j in 0..r {
                    let (ln, line) = next()?;
                    let mut it = line.split_whitespace();
                    let mut num = || -> Result<f64, SnapshotError> {
                        it.next()
                            .ok_or_else(|| parse_err(ln, "expected `re im`"))?
                            .parse()
                            .map_err(|_| parse_err(ln, "bad number"))
                    };
                    m[(i, j)] = Complex64::new(num()?, num()?);
                }
            }
            comp.push(m);
        }
        Ok(comp)
    };
    let x = read_component()?;
    let y = read_component()?;
    // Stored values are already anti-Hermitian; keep them bit-exact.
    Ok(ConnectionField::from_fluctuation_unchecked(OneForm::new(
        grid, x, y,
    )?))
}
