//! CSV writers. Comma separated, one header row, LF line endings, and every
//! float printed with 17 significant digits.

use std::io::Write;

use pml_core::objective::{ScanGrid, SweepRow};

use crate::error::CliError;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(format!("writing CSV: {e}"))
}

/// `theta_frac,<label>...`, one row per angle. All columns must share the
/// same angles.
pub fn write_sweep<W: Write>(out: W, labels: &[String], columns: &[Vec<SweepRow>]) -> Result<(), CliError> {
    let mut w = writer(out);
    let mut header = vec!["theta_frac".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    let rows = columns.first().map_or(0, Vec::len);
    for i in 0..rows {
        let mut record = vec![num(columns[0][i].theta_frac)];
        record.extend(columns.iter().map(|c| num(c[i].abs_r)));
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// `a2,ap,avg_R`, a2 as the slow index.
pub fn write_scan<W: Write>(out: W, grid: &ScanGrid) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(["a2", "ap", "avg_R"]).map_err(csv_err)?;
    for (a2, ap, v) in grid.cells() {
        w.write_record([num(a2), num(ap), num(v)]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_records<W: Write>(out: W, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = writer(out);
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
