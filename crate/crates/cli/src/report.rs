//! Tabular reports rendered as aligned text, CSV or JSON.

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_value(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => format_value(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(i) => (*i).into(),
            Cell::Text(t) => t.clone().into(),
            Cell::Missing => serde_json::Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<String> for Cell {
    fn from(t: String) -> Self {
        Cell::Text(t)
    }
}

/// Nine significant digits; fixed notation for moderate magnitudes.
pub fn format_value(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    // the exponent after rounding to nine digits
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name || c.split(" [").next() == Some(name))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    /// Context lines for text and JSON output.
    pub meta: Vec<(String, String)>,
    pub tables: Vec<Table>,
    /// Set when the report is written but the command still failed.
    pub failure: Option<String>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    name: &'a str,
    columns: &'a [String],
    rows: Vec<Vec<serde_json::Value>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    meta: serde_json::Map<String, serde_json::Value>,
    tables: Vec<JsonTable<'a>>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Text => Ok(self.text()),
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out += &format!("# {k}: {v}\n");
        }
        for t in &self.tables {
            out += &format!("\n[{}]\n", t.name);
            let cells: Vec<Vec<String>> = t.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
            let widths: Vec<usize> = (0..t.columns.len())
                .map(|j| {
                    cells
                        .iter()
                        .map(|r| r[j].chars().count())
                        .chain([t.columns[j].chars().count()])
                        .max()
                        .unwrap_or(0)
                })
                .collect();
            let line = |fields: &[String]| -> String {
                let padded: Vec<String> = fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:>w$}", w = *w))
                    .collect();
                padded.join("  ").trim_end().to_string() + "\n"
            };
            out += &line(&t.columns);
            for r in &cells {
                out += &line(r);
            }
        }
        out
    }

    /// One CSV block per table, separated by a blank line.
    fn csv(&self) -> CliResult<String> {
        let mut blocks = Vec::new();
        for t in &self.tables {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Config(format!("csv output: {e}"));
            w.write_record(&t.columns).map_err(io)?;
            for r in &t.rows {
                w.write_record(r.iter().map(Cell::render)).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv output: {e}")))?;
            blocks.push(String::from_utf8(bytes).map_err(|e| CliError::Config(e.to_string()))?);
        }
        Ok(blocks.join("\n"))
    }

    fn json(&self) -> CliResult<String> {
        let report = JsonReport {
            command: &self.command,
            meta: self.meta.iter().map(|(k, v)| (k.clone(), v.clone().into())).collect(),
            tables: self
                .tables
                .iter()
                .map(|t| JsonTable {
                    name: &t.name,
                    columns: &t.columns,
                    rows: t.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&report)
            .map(|s| s + "\n")
            .map_err(|e| CliError::Config(format!("json output: {e}")))
    }
}
