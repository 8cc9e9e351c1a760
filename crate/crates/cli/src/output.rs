//! Tabular output in CSV or JSON with a metadata block.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

/// Version of the column layout and metadata keys.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:?}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Metadata entries in insertion order.
pub type Metadata = Vec<(&'static str, Value)>;

fn render_csv(out: &mut impl Write, metadata: &Metadata, table: &Table) -> io::Result<()> {
    for (key, value) in metadata {
        let text = match value {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        writeln!(out, "# {key}: {text}")?;
    }
    writeln!(out, "{}", table.columns.join(","))?;
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(Cell::csv).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

fn render_json(out: &mut impl Write, metadata: &Metadata, table: &Table) -> io::Result<()> {
    let meta: Map<String, Value> = metadata.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    let data: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table
                .columns
                .iter()
                .zip(row)
                .map(|(c, cell)| (c.to_string(), cell.json()))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("metadata".into(), Value::Object(meta));
    doc.insert("data".into(), Value::Array(data));
    serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
    writeln!(out)
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, format: Format, metadata: &Metadata, table: &Table) -> Result<()> {
    let render = |out: &mut dyn Write| -> io::Result<()> {
        let mut out = BufWriter::new(out);
        match format {
            Format::Csv => render_csv(&mut out, metadata, table)?,
            Format::Json => render_json(&mut out, metadata, table)?,
        }
        out.flush()
    };
    match path {
        Some(path) => {
            let mut file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            render(&mut file).with_context(|| format!("cannot write {}", path.display()))
        }
        None => render(&mut io::stdout().lock()).context("cannot write to stdout"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_text_with_commas() {
        assert_eq!(Cell::Text("(1,2)".into()).csv(), "\"(1,2)\"");
        assert_eq!(Cell::Float(0.1).csv(), "0.1");
        assert_eq!(Cell::Float(2.5e-17).csv(), "2.5e-17");
        assert_eq!(Cell::Empty.csv(), "");
    }

    #[test]
    fn floats_round_trip() {
        let v = 1.0 / 3.0;
        assert_eq!(Cell::Float(v).csv().parse::<f64>().unwrap(), v);
        assert_eq!(Cell::Float(f64::NAN).json(), Value::Null);
    }
}
