//! Writing reports: pretty JSON with a trailing newline, and flat CSV of cell masses.

use std::path::Path;

use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiments::CellMass;

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

/// `t, cell_id, mass, stderr` rows.
pub fn cells_csv<'a>(rows: impl IntoIterator<Item = (f64, &'a [CellMass])>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "cell_id", "mass", "stderr"])?;
    for (t, cells) in rows {
        for c in cells {
            w.write_record([t.to_string(), c.cell.to_string(), c.mass.to_string(), c.stderr.to_string()])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}
