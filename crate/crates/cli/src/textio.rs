//! Deterministic text output: fixed-format floats and CSV writing.

use std::path::Path;

use crate::CliError;

/// Scientific notation with 17 significant digits, enough to round-trip
/// any f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a CSV file with a header row; every cell is already a string.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut body = String::new();
    body.push_str(&header.join(","));
    body.push('\n');
    for row in rows {
        body.push_str(&row.join(","));
        body.push('\n');
    }
    std::fs::write(path, body)?;
    Ok(())
}
