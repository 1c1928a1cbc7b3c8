//! `CMX1` dense matrix files.
//!
//! Layout: the magic line `CMX1\n`, an ASCII header `<rows> <cols> <kind>\n`
//! with kind `c128` or `f64`, then row-major little-endian IEEE-754 doubles
//! (interleaved real/imaginary parts for `c128`).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::mom::OperatorError;
use crate::{Error, Result};

const MAGIC: &[u8] = b"CMX1\n";

#[derive(Debug, Clone, PartialEq)]
pub enum StoredMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

impl StoredMatrix {
    pub fn into_complex(self) -> DMatrix<Complex64> {
        match self {
            StoredMatrix::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
            StoredMatrix::Complex(m) => m,
        }
    }

    /// The real matrix, or an error if the file held complex values.
    pub fn into_real(self) -> Result<DMatrix<f64>> {
        match self {
            StoredMatrix::Real(m) => Ok(m),
            StoredMatrix::Complex(_) => Err(format_error("expected kind f64, found c128")),
        }
    }
}

fn format_error(msg: impl Into<String>) -> Error {
    Error::Operator(OperatorError::Format(msg.into()))
}

pub fn write_real(m: &DMatrix<f64>, mut out: impl Write) -> Result<()> {
    write!(out, "CMX1\n{} {} f64\n", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn write_complex(m: &DMatrix<Complex64>, mut out: impl Write) -> Result<()> {
    write!(out, "CMX1\n{} {} c128\n", m.nrows(), m.ncols())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.write_all(&m[(i, j)].re.to_le_bytes())?;
            out.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_matrix(mut input: impl Read) -> Result<StoredMatrix> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic).map_err(|_| format_error("file too short for CMX1 magic"))?;
    if magic != MAGIC {
        return Err(format_error("missing CMX1 magic"));
    }
    let mut header = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        input.read_exact(&mut byte).map_err(|_| format_error("unterminated CMX1 header"))?;
        if byte[0] == b'\n' {
            break;
        }
        header.push(byte[0]);
        if header.len() > 128 {
            return Err(format_error("CMX1 header too long"));
        }
    }
    let header = String::from_utf8(header).map_err(|_| format_error("CMX1 header is not ASCII"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [rows, cols, kind] = fields[..] else {
        return Err(format_error(format!("bad CMX1 header '{header}'")));
    };
    let rows: usize = rows.parse().map_err(|_| format_error(format!("bad row count '{rows}'")))?;
    let cols: usize = cols.parse().map_err(|_| format_error(format!("bad column count '{cols}'")))?;
    let per_entry = match kind {
        "f64" => 1,
        "c128" => 2,
        other => return Err(format_error(format!("unknown CMX1 kind '{other}'"))),
    };
    let count = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(per_entry))
        .ok_or_else(|| format_error("CMX1 dimensions overflow"))?;
    let mut values = Vec::with_capacity(count);
    let mut buf = [0u8; 8];
    for _ in 0..count {
        input
            .read_exact(&mut buf)
            .map_err(|_| format_error(format!("CMX1 payload truncated: expected {count} values")))?;
        values.push(f64::from_le_bytes(buf));
    }
    if input.read(&mut buf)? != 0 {
        return Err(format_error("trailing bytes after CMX1 payload"));
    }
    Ok(if per_entry == 1 {
        StoredMatrix::Real(DMatrix::from_row_slice(rows, cols, &values))
    } else {
        let entries: Vec<Complex64> = values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        StoredMatrix::Complex(DMatrix::from_row_slice(rows, cols, &entries))
    })
}

pub fn save_real(m: &DMatrix<f64>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_real(m, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn save_complex(m: &DMatrix<Complex64>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_complex(m, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<StoredMatrix> {
    read_matrix(BufReader::new(File::open(path)?))
}
