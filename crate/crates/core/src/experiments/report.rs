use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numfmt::{self, fmt17};

/// One named check. `pass` is always |measured − expected| ≤ tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(check: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self { check: check.into(), measured, expected, tolerance, pass }
    }

    /// Boolean condition recorded as 1/0 against an expected 1.
    pub fn holds(check: impl Into<String>, condition: bool) -> Self {
        Self::new(check, if condition { 1.0 } else { 0.0 }, 1.0, 0.0)
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Int(v) => v.to_string(),
            Self::Num(v) => fmt17(*v),
            Self::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Self::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.parameters.insert(key.to_string(), value);
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn verdict(&mut self, verdict: Verdict) {
        self.verdicts.push(verdict);
    }

    pub fn failed(&self) -> usize {
        self.verdicts.iter().filter(|v| !v.pass).count()
    }

    pub fn to_json(&self) -> String {
        numfmt::to_json(self).expect("report serializes")
    }

    /// Rows as CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Verdicts as CSV.
    pub fn verdicts_csv(&self) -> String {
        let mut out = String::from("check,measured,expected,tolerance,pass\n");
        for v in &self.verdicts {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                Cell::Text(v.check.clone()).csv(),
                fmt17(v.measured),
                fmt17(v.expected),
                fmt17(v.tolerance),
                v.pass
            ));
        }
        out
    }
}
