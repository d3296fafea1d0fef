//! Named columns of numbers and their CSV form.
//!
//! Every value is written with 15 significant digits in scientific notation,
//! so output bytes depend only on the values. The first line is a comment
//! recording the artifact version and the hash of the configuration.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Hex SHA-256 of `bytes`.
pub fn config_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// One value, 15 significant digits.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.14e}")
    }
}

impl SeriesTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Config(format!(
                "row of {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W, hash: &str, mode: &str) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!("# ge-sim {VERSION} mode={mode} config-sha256={hash}\n"));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn to_csv_string(&self, hash: &str, mode: &str) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, hash, mode).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }
}
