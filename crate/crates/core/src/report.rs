//! Deterministic file formats shared by the experiment harness and the CLI.
//!
//! CSV: comma-separated, header row, LF line endings, floats printed with
//! 17 significant digits (round-trip exact for f64). JSON goes through
//! serde_json with stable field order, so identical reports serialize to
//! identical bytes.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// 17-significant-digit decimal form, shortest within that budget.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{:.16e}", v);
    // Trim trailing zeros in the mantissa but keep round-trip exactness.
    debug_assert_eq!(s.parse::<f64>().ok(), Some(v));
    s
}

/// One CSV table with a fixed header.
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: Vec<S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.header.len(), "row width mismatch");
        self.rows.push(cells);
    }

    pub fn cell_float(v: f64) -> String {
        fmt_float(v)
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_string().as_bytes())
    }
}

/// Write bytes through a temp file so partially written outputs never
/// shadow a previous complete report.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Serialize as pretty JSON with a trailing newline.
pub fn to_json_bytes<S: serde::Serialize>(value: &S) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for &v in &[
            0.0,
            1.0,
            -1.0,
            std::f64::consts::PI,
            1e-300,
            -2.2250738585072014e-308,
            123456789.123456789,
            f64::MAX,
        ] {
            let s = fmt_float(v);
            if v == 0.0 {
                assert_eq!(s, "0");
            } else {
                assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            }
        }
    }

    #[test]
    fn csv_shape_and_line_endings() {
        let mut t = CsvTable::new(vec!["a", "b"]);
        t.push_row(vec!["1".into(), fmt_float(0.5)]);
        let s = t.to_string();
        assert_eq!(s, format!("a,b\n1,{}\n", fmt_float(0.5)));
        assert!(!s.contains('\r'));
    }
}
