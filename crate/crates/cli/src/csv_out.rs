//! CSV artifacts: header row, 17 significant digits, `.` decimal separator,
//! `\n` line endings. Nothing time- or host-dependent is written.

use std::path::Path;

use anyhow::{Context, Result};

/// Scientific notation with 17 significant digits (lossless for `f64`).
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_table<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
