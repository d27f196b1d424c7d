use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// One CSV cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// 17 significant digits, so every `f64` round-trips.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format_float(*v),
            Cell::I(v) => v.to_string(),
            Cell::B(v) => v.to_string(),
            Cell::S(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::S(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&'static str]) -> Self {
        Table { name: name.to_string(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Fixed column order, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Whether the numbers are complete or limited by the precision ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    PrecisionCeiling,
    /// A verification check failed.
    Failed,
}

pub struct Bundle {
    pub result: Value,
    pub tables: Vec<Table>,
    pub plots: Vec<Table>,
    pub summary: String,
    pub outcome: Outcome,
}

impl Bundle {
    pub fn new(result: Value, summary: String) -> Self {
        Bundle { result, tables: Vec::new(), plots: Vec::new(), summary, outcome: Outcome::Ok }
    }
}

/// Recursively rebuilds maps with sorted keys.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut out = Map::new();
            for (k, v) in entries {
                out.insert(k, canonical(v));
            }
            Value::Object(out)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn to_json(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&canonical(v)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `<cmd>.json`, `<cmd>_<table>.csv`, plot series and `<cmd>.txt`
/// under `dir`; returns the paths written.
pub fn emit(command: &str, json: &str, bundle: &Bundle, dir: &Path, mkdirs: bool, plot_data: bool) -> Result<Vec<PathBuf>, CliError> {
    if !dir.is_dir() {
        if mkdirs {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        } else {
            return Err(CliError::Io(format!("output directory {} does not exist (use --mkdirs)", dir.display())));
        }
    }
    let mut written = Vec::new();
    let mut put = |name: String, contents: &str| -> Result<(), CliError> {
        let p = dir.join(name);
        write_file(&p, contents)?;
        written.push(p);
        Ok(())
    };
    put(format!("{command}.json"), json)?;
    for t in &bundle.tables {
        put(format!("{command}_{}.csv", t.name), &t.to_csv())?;
    }
    if plot_data {
        for t in &bundle.plots {
            put(format!("{command}_{}.csv", t.name), &t.to_csv())?;
        }
    }
    put(format!("{command}.txt"), &bundle.summary)?;
    Ok(written)
}
