use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::Value;

/// Schema version of the report document.
pub const REPORT_VERSION: &str = "segal-quant-report/1";

/// Matrices with more rows or columns than this are summarized unless
/// full output is requested.
pub const MATRIX_LIMIT: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Entry {
    /// Passes when `residual <= tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum MatrixField {
    Rows(Vec<Vec<f64>>),
    Omitted { omitted: bool, rows: usize, cols: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub entries: Vec<Entry>,
    pub matrices: BTreeMap<String, MatrixField>,
    pub tables: BTreeMap<String, Value>,
    pub timings: BTreeMap<String, f64>,
    pub pass: bool,
    #[serde(skip)]
    full_matrices: bool,
}

impl Report {
    pub fn new(command: &str, config: Value, full_matrices: bool) -> Self {
        Self {
            version: REPORT_VERSION,
            command: command.to_string(),
            config,
            entries: Vec::new(),
            matrices: BTreeMap::new(),
            tables: BTreeMap::new(),
            timings: BTreeMap::new(),
            pass: true,
            full_matrices,
        }
    }

    pub fn entry(&mut self, entry: Entry) {
        self.pass &= entry.pass;
        self.entries.push(entry);
    }

    pub fn matrix(&mut self, name: &str, m: &DMatrix<f64>) {
        let field = if self.full_matrices || (m.nrows() <= MATRIX_LIMIT && m.ncols() <= MATRIX_LIMIT) {
            MatrixField::Rows(segal_core::linalg::to_rows(m))
        } else {
            MatrixField::Omitted {
                omitted: true,
                rows: m.nrows(),
                cols: m.ncols(),
            }
        };
        self.matrices.insert(name.to_string(), field);
    }

    pub fn table(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report tables are plain data");
        self.tables.insert(name.to_string(), v);
    }

    pub fn timing(&mut self, name: &str, secs: f64) {
        self.timings.insert(name.to_string(), secs);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per entry plus a verdict, for humans.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{:<4} {:<28} {:>12.4e}  (tol {:.1e})\n",
                if e.pass { "ok" } else { "FAIL" },
                e.name,
                e.residual,
                e.tolerance
            ));
        }
        out.push_str(&format!(
            "{}: {}\n",
            self.command,
            if self.pass { "pass" } else { "FAIL" }
        ));
        out
    }
}
