//! Result files. Numbers are written in the shortest form that parses back
//! to the same bits, so every writer round-trips through its reader.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::grid::make_grids;

const FIELD_MAGIC: &[u8; 8] = b"KCHEMPF1";

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Format(e.to_string())
    }
}

/// Numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Shortest round-tripping form, in exponent notation outside `[1e-4, 1e15)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(&table.header).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_number(x)))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::Format(format!("row {}: {s:?}: {e}", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let r = BufReader::new(File::open(path)?);
    serde_json::from_reader(r).map_err(|e| Error::Format(e.to_string()))
}

/// Little-endian binary: magic, `n_x`, `n_v` (u64), `L`, `V` (f64), then the
/// values row-major with `x` as the slow index.
pub fn write_field(path: &Path, f: &PhaseField) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(f.x_grid().len() as u64).to_le_bytes())?;
    w.write_all(&(f.v_grid().len() as u64).to_le_bytes())?;
    w.write_all(&f.x_grid().half_width().to_le_bytes())?;
    w.write_all(&f.v_grid().half_width().to_le_bytes())?;
    for &y in f.values().iter() {
        w.write_all(&y.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<PhaseField> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Format(format!(
            "{}: not a phase-field file",
            path.display()
        )));
    }
    let mut word = [0u8; 8];
    let mut next = |r: &mut BufReader<File>| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let nx = u64::from_le_bytes(next(&mut r)?) as usize;
    let nv = u64::from_le_bytes(next(&mut r)?) as usize;
    let l = f64::from_le_bytes(next(&mut r)?);
    let vmax = f64::from_le_bytes(next(&mut r)?);
    let (x, v) = make_grids(l, nx, vmax, nv)?;
    let mut values = Vec::with_capacity(nx * nv);
    for _ in 0..nx * nv {
        values.push(f64::from_le_bytes(next(&mut r)?));
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(Error::Format(format!(
            "{}: {} trailing bytes",
            path.display(),
            rest.len()
        )));
    }
    let values =
        Array2::from_shape_vec((nx, nv), values).map_err(|e| Error::Format(e.to_string()))?;
    PhaseField::new(x, v, values)
}
