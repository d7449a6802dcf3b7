//! CSV matrix and mask files.
//!
//! Matrices are written one row per line, comma separated, with each value
//! in shortest round-trip decimal form. An empty cell marks an unobserved
//! entry. Masks use the same layout with `1` (observed) and `0` cells.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{Mask, Matrix};

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        reason: e.to_string(),
    }
}

/// Writes `m`, leaving cells outside `mask` empty. With `header`, a first
/// line `c0,c1,…` names the columns.
pub fn write_matrix_csv<W: Write>(out: W, m: &Matrix, mask: Option<&Mask>, header: bool) -> Result<()> {
    if let Some(mask) = mask {
        mask.check_matches(m)?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    if header {
        w.write_record((0..m.cols()).map(|j| format!("c{j}"))).map_err(csv_err)?;
    }
    let mut record = Vec::with_capacity(m.cols());
    for i in 0..m.rows() {
        record.clear();
        for j in 0..m.cols() {
            let cell = match mask {
                Some(mask) if !mask.contains(i, j) => String::new(),
                _ => format!("{}", m[(i, j)]),
            };
            record.push(cell);
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a matrix; empty cells become unobserved entries (stored as 0).
pub fn read_matrix_csv<R: Read>(input: R, header: bool) -> Result<(Matrix, Mask)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(header)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut data = Vec::new();
    let mut bits = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(k + 1, |p| p.line() as usize);
        match cols {
            None => cols = Some(rec.len()),
            Some(c) if c != rec.len() => {
                return Err(Error::Parse {
                    line,
                    reason: format!("expected {c} cells, found {}", rec.len()),
                })
            }
            _ => {}
        }
        for cell in rec.iter() {
            if cell.is_empty() {
                data.push(0.0);
                bits.push(false);
            } else {
                let v: f64 = cell.parse().map_err(|e| Error::Parse {
                    line,
                    reason: format!("bad number {cell:?}: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        reason: format!("non-finite value {cell:?}"),
                    });
                }
                data.push(v);
                bits.push(true);
            }
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    let m = Matrix::from_row_major(rows, cols, &data)?;
    let mask = Mask::from_bitmap(rows, cols, bits)?;
    Ok((m, mask))
}

pub fn write_mask_csv<W: Write>(out: W, mask: &Mask) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for i in 0..mask.rows() {
        w.write_record((0..mask.cols()).map(|j| if mask.contains(i, j) { "1" } else { "0" }))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_mask_csv<R: Read>(input: R) -> Result<Mask> {
    let (m, observed) = read_matrix_csv(input, false)?;
    if !observed.is_full() {
        return Err(Error::Parse {
            line: 0,
            reason: "mask file has empty cells".into(),
        });
    }
    let mut bits = Vec::with_capacity(m.rows() * m.cols());
    for v in m.to_row_major() {
        match v {
            x if x == 1.0 => bits.push(true),
            x if x == 0.0 => bits.push(false),
            other => {
                return Err(Error::Parse {
                    line: 0,
                    reason: format!("mask cells must be 0 or 1, found {other}"),
                })
            }
        }
    }
    Mask::from_bitmap(m.rows(), m.cols(), bits)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix, mask: Option<&Mask>, header: bool) -> Result<()> {
    write_matrix_csv(File::create(path)?, m, mask, header)
}

pub fn load_matrix(path: impl AsRef<Path>, header: bool) -> Result<(Matrix, Mask)> {
    read_matrix_csv(File::open(path)?, header)
}

pub fn save_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    write_mask_csv(File::create(path)?, mask)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<Mask> {
    read_mask_csv(File::open(path)?)
}
