//! JSON and CSV output of run reports and matrices.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::run::RunReport;

/// One row per run: `run,seed,amari,converged,est_dims,wall_time,error`.
pub fn write_summary_csv<W: Write>(report: &RunReport, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["run", "seed", "amari", "converged", "est_dims", "wall_time", "error"])?;
    for r in &report.records {
        let dims = r
            .est_dims
            .as_ref()
            .map(|d| d.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        out.write_record([
            r.run.to_string(),
            r.seed.to_string(),
            r.amari.map(|a| format!("{a:e}")).unwrap_or_default(),
            r.ica.as_ref().map(|i| i.converged.to_string()).unwrap_or_default(),
            dims,
            r.timings.as_ref().map(|t| format!("{:.6}", t.total)).unwrap_or_default(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `<stem>.json` (full report) and `<stem>.csv` (per-run summary).
pub fn save_report(report: &RunReport, stem: impl AsRef<Path>) -> Result<()> {
    let stem = stem.as_ref();
    let json = BufWriter::new(File::create(stem.with_extension("json"))?);
    serde_json::to_writer_pretty(json, report)?;
    write_summary_csv(report, BufWriter::new(File::create(stem.with_extension("csv"))?))
}

/// Headerless CSV, one matrix row per line.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    for i in 0..m.nrows() {
        out.write_record(m.row(i).iter().map(|v| format!("{v:e}")))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_matrix_csv<R: Read>(r: R) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Format(format!("bad number {f:?} in matrix row {}", rows.len() + 1))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Format(format!("matrix row {} has {} entries, expected {}", rows.len() + 1, row.len(), first.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("empty matrix".into()));
    }
    let (n, k) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
}

/// Values of column `name` (or of the only column when `name` is `None`) in a
/// headed CSV; empty cells are skipped.
pub fn read_csv_column<R: Read>(r: R, name: Option<&str>) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = reader.headers()?.clone();
    let index = match name {
        Some(n) => headers
            .iter()
            .position(|h| h == n)
            .ok_or_else(|| Error::Format(format!("no column {n:?} in {headers:?}")))?,
        None if headers.len() == 1 => 0,
        None => return Err(Error::Format(format!("several columns {headers:?}; choose one"))),
    };
    let mut values = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let cell = record.get(index).unwrap_or("");
        if cell.is_empty() {
            continue;
        }
        values.push(cell.parse().map_err(|_| Error::Format(format!("bad number {cell:?} on data line {}", line + 1)))?);
    }
    Ok(values)
}
