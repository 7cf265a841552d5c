//! CSV, JSON and gnuplot writers. Floats in CSVs carry 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty cell for a missing value.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))
}

/// Writes a header and rows of preformatted cells.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    let io = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(path.to_path_buf())
}

pub fn write_text(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(path.to_path_buf())
}

/// Preamble shared by the emitted gnuplot scripts.
pub fn gnuplot_header(output_png: &str, xlabel: &str, ylabel: &str, logx: bool) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal pngcairo size 900,600\n");
    s.push_str(&format!("set output '{output_png}'\n"));
    s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"));
    if logx {
        s.push_str("set logscale x\nset format x '10^{%L}'\n");
    }
    s.push_str("set key top left\n");
    s
}
