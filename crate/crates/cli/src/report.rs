//! Plain-text and CSV output with stable 6-decimal formatting, so repeated
//! runs with the same seed produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn fnum(x: f64) -> String {
    format!("{x:.6}")
}

/// Render an aligned text table with a header row.
pub fn text_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let render = |cells: Vec<&str>, out: &mut String| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let _ = write!(out, "{cell:>w$}", w = w);
        }
        out.push('\n');
    };
    render(headers.to_vec(), &mut out);
    for row in rows {
        render(row.iter().map(|s| s.as_str()).collect(), &mut out);
    }
    out
}

/// Write a CSV file with one header line and fixed 6-decimal cells.
pub fn write_csv(path: &Path, headers: &[&str], rows: &[Vec<String>]) -> Result<(), String> {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        }
    }
    fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

pub fn describe_intervals(intervals: &[(f64, f64)]) -> String {
    if intervals.is_empty() {
        return "empty".to_string();
    }
    intervals
        .iter()
        .map(|(lo, hi)| format!("({}, {})", fnum(*lo), fnum(*hi)))
        .collect::<Vec<_>>()
        .join(" U ")
}
