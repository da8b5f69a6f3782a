//! Tabular results and their text, CSV and JSON renderings.
//!
//! CSV and JSON output parse back into a [`Report`] that renders to the same
//! bytes, so downstream tools can filter and re-emit without drift.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Num(f64),
    /// Counts and indices; never rounded.
    Int(u64),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form remarks: printed under the table, carried in JSON, sent to stderr for CSV.
    pub notes: Vec<String>,
}

impl Report {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, digits: Option<usize>) -> Result<String, CliError> {
        match format {
            Format::Table => Ok(self.to_table(digits.or(Some(4)))),
            Format::Csv => self.to_csv(digits),
            Format::Json => Ok(self.to_json(digits)),
        }
    }

    fn to_table(&self, digits: Option<usize>) -> String {
        let text: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|c| cell_text(c, digits)).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|j| {
                text.iter()
                    .map(|r| r[j].chars().count())
                    .chain([self.columns[j].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |cells: Vec<(&str, bool)>, out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(&(s, right), &w)| {
                    if right {
                        format!("{s:>w$}")
                    } else {
                        format!("{s:<w$}")
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(
            self.columns.iter().map(|c| (c.as_str(), false)).collect(),
            &mut out,
        );
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&text) {
            line(
                row.iter()
                    .zip(cells)
                    .map(|(c, s)| (s.as_str(), !matches!(c, Cell::Text(_))))
                    .collect(),
                &mut out,
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }

    fn to_csv(&self, digits: Option<usize>) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| cell_text(c, digits)))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }

    fn to_json(&self, digits: Option<usize>) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(|c| cell_json(c, digits)).collect()))
            .collect();
        let doc = json!({ "columns": self.columns, "rows": rows, "notes": self.notes });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn parse_csv(text: &str) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(parse_cell).collect());
        }
        Ok(Self {
            columns,
            rows,
            notes: Vec::new(),
        })
    }

    pub fn parse_json(text: &str) -> Result<Self, CliError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Output(e.to_string()))?;
        let strings = |key: &str| -> Result<Vec<String>, CliError> {
            doc[key]
                .as_array()
                .ok_or_else(|| CliError::Output(format!("JSON lacks `{key}`")))?
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(String::from)
                        .ok_or_else(|| CliError::Output(format!("`{key}` must hold strings")))
                })
                .collect()
        };
        let columns = strings("columns")?;
        let notes = strings("notes")?;
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| CliError::Output("JSON lacks `rows`".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| CliError::Output("rows must be arrays".into()))
                    .map(|cells| cells.iter().map(json_cell).collect())
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            columns,
            rows,
            notes,
        })
    }
}

/// `v` with `k` significant digits, or the shortest round-trip decimal when `k` is `None`.
pub fn format_number(v: f64, digits: Option<usize>) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let Some(k) = digits.filter(|&k| k > 0) else {
        return format!("{v}");
    };
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{:.*e}", k - 1, v);
    }
    let decimals = (k as i32 - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn cell_text(c: &Cell, digits: Option<usize>) -> String {
    match c {
        Cell::Text(s) => s.clone(),
        Cell::Num(v) => format_number(*v, digits),
        Cell::Int(v) => v.to_string(),
    }
}

fn cell_json(c: &Cell, digits: Option<usize>) -> Value {
    match c {
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Int(v) => json!(v),
        Cell::Num(v) if v.is_nan() => Value::Null,
        Cell::Num(v) if v.is_infinite() => {
            Value::String(if *v > 0.0 { "Infinity" } else { "-Infinity" }.into())
        }
        Cell::Num(v) => {
            let rounded = match digits {
                Some(_) => format_number(*v, digits).parse().unwrap_or(*v),
                None => *v,
            };
            json!(rounded)
        }
    }
}

fn parse_cell(s: &str) -> Cell {
    match s {
        "inf" => Cell::Num(f64::INFINITY),
        "-inf" => Cell::Num(f64::NEG_INFINITY),
        "nan" => Cell::Num(f64::NAN),
        _ => match (s.parse::<u64>(), s.parse::<f64>()) {
            (Ok(v), _) if v.to_string() == s => Cell::Int(v),
            (_, Ok(v)) if v.is_finite() && format!("{v}") == s => Cell::Num(v),
            _ => Cell::Text(s.to_string()),
        },
    }
}

fn json_cell(v: &Value) -> Cell {
    match v {
        Value::Null => Cell::Num(f64::NAN),
        Value::Number(n) if n.is_u64() => Cell::Int(n.as_u64().unwrap_or_default()),
        Value::Number(n) => Cell::Num(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) if s == "Infinity" => Cell::Num(f64::INFINITY),
        Value::String(s) if s == "-Infinity" => Cell::Num(f64::NEG_INFINITY),
        Value::String(s) => Cell::Text(s.clone()),
        other => Cell::Text(other.to_string()),
    }
}
