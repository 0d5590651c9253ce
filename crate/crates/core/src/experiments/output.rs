//! CSV and JSON writers. Floats use 17 significant digits.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{MemsError, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_COLUMNS: [&str; 6] = ["t", "min_gap", "sup_u", "norm_H2", "g_sup", "in_S_alpha"];
pub const LEDGER_COLUMNS: [&str; 6] = ["t", "Em", "Ee", "kinetic", "dissipation", "residual"];

/// Round-trip formatting of a double.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// Header plus rows of preformatted cells.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| MemsError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| MemsError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(value).map_err(|e| MemsError::Io(e.to_string()))?;
    write_file(dir, name, &(text + "\n"))
}

/// JSON cannot carry non-finite numbers; they are written as strings.
pub fn json_f64(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(v.to_string())
    }
}

/// Reads back a CSV written by [`csv`]: header and numeric rows.
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| MemsError::Argument("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|c| match c {
                    "true" => Ok(1.0),
                    "false" => Ok(0.0),
                    _ => c
                        .parse::<f64>()
                        .map_err(|_| MemsError::Argument(format!("non-numeric CSV cell {c:?}"))),
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::E * 1e-300, -123456.789e10, 0.0] {
            assert_eq!(fmt(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_round_trip() {
        let text = csv(&["a", "b"], vec![vec![fmt(0.1), "true".into()]]);
        let (h, rows) = parse_numeric_csv(&text).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows, vec![vec![0.1, 1.0]]);
    }
}
