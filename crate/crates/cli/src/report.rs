use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub config_echo: RunConfig,
    pub metrics: Map<String, Value>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(cfg: &RunConfig, metrics: Map<String, Value>, pass: bool) -> Self {
        Report {
            command: cfg.command.clone(),
            config_echo: cfg.clone(),
            metrics,
            pass,
            table: None,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    /// Writes in the configured format to `--out`, or to stdout.
    pub fn emit(&self, cfg: &RunConfig) -> Result<()> {
        match &cfg.out {
            Some(path) => {
                let file = File::create(path)
                    .with_context(|| format!("cannot create {}", path.display()))?;
                let mut w = BufWriter::new(file);
                self.write(cfg.format, &mut w)?;
                w.flush()?;
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                self.write(cfg.format, &mut w)?;
                w.flush()?;
            }
        }
        Ok(())
    }

    fn write(&self, format: Format, w: &mut dyn Write) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, self)?;
                writeln!(w)?;
            }
            Format::Csv => match &self.table {
                Some(t) => write_table(t, w)?,
                None => {
                    let mut flat = Vec::new();
                    flatten("", &Value::Object(self.metrics.clone()), &mut flat);
                    flat.push(("pass".into(), self.pass.to_string()));
                    let mut out = csv::Writer::from_writer(w);
                    out.write_record(["metric", "value"])?;
                    for (k, v) in flat {
                        out.write_record([k, v])?;
                    }
                    out.flush()?;
                }
            },
        }
        Ok(())
    }
}

pub fn write_table(t: &Table, w: &mut dyn Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&t.header)?;
    for row in &t.rows {
        out.write_record(row.iter().map(Cell::render))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_table_to(t: &Table, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    write_table(t, &mut w)?;
    w.flush()?;
    Ok(())
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// JSON number, or `null` for non-finite values.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}
