//! Comma-separated diagnostics time series.
//!
//! One row per [`DiagnosticsRecord`], columns in [`COLUMNS`] order. Floats use
//! the shortest representation that round-trips exactly, so identical runs
//! produce identical bytes.

use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::timestepper::DiagnosticsRecord;
use crate::verifier::BoundRow;

/// Column order of the diagnostics file (the field order of the record).
pub const COLUMNS: [&str; 14] = [
    "step",
    "t",
    "l2",
    "grad_l2",
    "semi2_sq",
    "cubic",
    "e1",
    "mean_residual",
    "diss_integral",
    "forcing_work",
    "forcing_sq_integral",
    "eps_grad_semi2_integral",
    "balance_residual",
    "e1_drift",
];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Argument(format!("{}: {other:?}", path.display())),
    }
}

/// Appender that remembers the last time written.
pub struct DiagnosticsWriter {
    path: PathBuf,
    writer: csv::Writer<File>,
    last_t: Option<f64>,
}

impl DiagnosticsWriter {
    /// Opens `path` for appending. An existing non-empty file must carry the
    /// expected header; its last row fixes the time to continue from.
    pub fn open(path: &Path) -> Result<Self> {
        let mut last_t = None;
        let mut has_header = false;
        if path.exists() && std::fs::metadata(path).map_err(|e| Error::io(path, e))?.len() > 0 {
            let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
            let header = reader.headers().map_err(|e| csv_err(path, e))?;
            if header.iter().ne(COLUMNS) {
                return Err(Error::Argument(format!(
                    "{} exists with a different header",
                    path.display()
                )));
            }
            has_header = true;
            for rec in reader.deserialize::<DiagnosticsRecord>() {
                last_t = Some(rec.map_err(|e| csv_err(path, e))?.t);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if !has_header {
            writer.write_record(COLUMNS).map_err(|e| csv_err(path, e))?;
        }
        Ok(DiagnosticsWriter {
            path: path.to_path_buf(),
            writer,
            last_t,
        })
    }

    /// Appends one row; `t` must exceed every time already in the file.
    pub fn append(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        if let Some(last) = self.last_t {
            if !(r.t > last) {
                return Err(Error::Argument(format!(
                    "{}: time {} does not follow {}",
                    self.path.display(),
                    r.t,
                    last
                )));
            }
        }
        self.writer.serialize(r).map_err(|e| csv_err(&self.path, e))?;
        self.last_t = Some(r.t);
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Appends `record` to `path`, writing the header first if the file is new.
pub fn append_diagnostics(record: &DiagnosticsRecord, path: &Path) -> Result<()> {
    let mut w = DiagnosticsWriter::open(path)?;
    w.append(record)?;
    w.flush()
}

/// Reads every row of a diagnostics file.
pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    reader
        .deserialize()
        .map(|r| r.map_err(|e| csv_err(path, e)))
        .collect()
}

/// Column order of the ε-sweep bound table.
pub const BOUND_COLUMNS: [&str; 6] = [
    "epsilon",
    "sup_l2_sq",
    "sup_grad_sq",
    "eps_int_semi2",
    "eps_int_grad_semi2",
    "mean_residual",
];

/// Writes an ε-sweep bound table, replacing any existing file.
pub fn write_bound_table(rows: &[BoundRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    if rows.is_empty() {
        w.write_record(BOUND_COLUMNS).map_err(|e| csv_err(path, e))?;
    }
    for r in rows {
        w.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
