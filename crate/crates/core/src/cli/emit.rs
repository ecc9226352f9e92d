//! Result tables and their CSV / JSON serialization.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::{Format, RunConfig};
use crate::{Error, Result};

/// One table cell. Non-finite numbers are stored as [`Cell::Missing`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn num(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Missing
        }
    }

    pub fn int(x: usize) -> Cell {
        Cell::Int(x as i64)
    }

    pub fn text(s: &str) -> Cell {
        Cell::Text(s.to_string())
    }

    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Missing, Cell::num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Panics if the row does not match the declared schema.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from schema of {}", self.name);
        self.rows.push(row);
    }
}

/// Everything a command produces: metadata, scalar summary fields and tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Map<String, Value>,
    #[serde(flatten)]
    pub summary: Map<String, Value>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        let mut metadata = Map::new();
        metadata.insert("command".into(), config.command.name().into());
        metadata.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        if config.alpha_given {
            metadata.insert("alpha".into(), config.weight.alpha().into());
        }
        metadata.insert("seed".into(), config.seed.into());
        metadata.insert("rng".into(), "ChaCha20".into());
        metadata.insert("measure".into(), "dtheta/2pi".into());
        metadata.insert("toeplitz".into(), "T_ij = fhat(i-j)".into());
        let c: Vec<Value> = config
            .weight
            .c_coefficients()
            .iter()
            .map(|z| Value::from(vec![z.re, z.im]))
            .collect();
        metadata.insert("c".into(), Value::Array(c));
        Report {
            metadata,
            summary: Map::new(),
            tables: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn field(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.into(), value.into());
    }
}

/// Finite floats as JSON numbers, everything else as `null`.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Write the report; returns the files written.
pub fn emit(report: &Report, path: &Path, format: Format) -> Result<Vec<PathBuf>> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(report).map_err(|source| Error::Json {
                path: path.to_path_buf(),
                source,
            })?;
            write_file(path, &(text + "\n"))?;
            Ok(vec![path.to_path_buf()])
        }
        Format::Csv => {
            if report.tables.is_empty() {
                write_file(path, &csv_header(report, None))?;
                return Ok(vec![path.to_path_buf()]);
            }
            let single = report.tables.len() == 1;
            let mut written = Vec::new();
            for t in &report.tables {
                let p = if single { path.to_path_buf() } else { table_path(path, &t.name) };
                write_file(&p, &csv_table(report, t))?;
                written.push(p);
            }
            Ok(written)
        }
    }
}

/// `out.csv` → `out-<name>.csv`.
pub fn table_path(path: &Path, name: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = match path.extension() {
        Some(ext) => format!("{stem}-{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}-{name}"),
    };
    path.with_file_name(file)
}

fn csv_header(report: &Report, table: Option<&str>) -> String {
    let mut s = String::new();
    for (k, v) in &report.metadata {
        s.push_str(&format!("# {k}: {}\n", scalar(v)));
    }
    for (k, v) in &report.summary {
        s.push_str(&format!("# {k}: {}\n", scalar(v)));
    }
    if let Some(name) = table {
        s.push_str(&format!("# table: {name}\n"));
    }
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_table(report: &Report, t: &Table) -> String {
    let mut s = csv_header(report, Some(&t.name));
    s.push_str(&t.columns.join(","));
    s.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(text.as_bytes()).map_err(io)
}

/// Parse a JSON report written by [`emit`].
pub fn read_report(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
