//! CSV and JSON emission. Every float goes out with 12 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use vilenkin::signal::fmt_sig;

use crate::CliError;

/// One CSV cell.
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_sig(*x),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

pub struct Table {
    name: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Table { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Rounds every float in a JSON tree to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r: f64 = fmt_sig(x).parse().unwrap_or(x);
                if let Some(num) = serde_json::Number::from_f64(r) {
                    *n = num;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Collects artifacts in memory and writes them at the end of a command.
pub struct Artifacts {
    dir: PathBuf,
    tables: Vec<Table>,
    summaries: Vec<(String, Value)>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Self {
        Artifacts { dir: dir.to_path_buf(), tables: Vec::new(), summaries: Vec::new() }
    }

    pub fn table(&mut self, t: Table) {
        self.tables.push(t);
    }

    pub fn summary(&mut self, name: &str, mut v: Value) {
        round_floats(&mut v);
        self.summaries.push((name.into(), v));
    }

    pub fn write(self) -> Result<Vec<PathBuf>, CliError> {
        let io = |p: &Path, e: std::io::Error| CliError::Output(format!("{}: {e}", p.display()));
        fs::create_dir_all(&self.dir).map_err(|e| io(&self.dir, e))?;
        let mut written = Vec::new();
        for t in self.tables {
            let path = self.dir.join(format!("{}.csv", t.name));
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            let csv_err = |e: csv::Error| CliError::Output(format!("{}: {e}", path.display()));
            w.write_record(&t.header).map_err(csv_err)?;
            for row in &t.rows {
                w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
            }
            w.flush().map_err(|e| io(&path, e))?;
            written.push(path);
        }
        for (name, v) in self.summaries {
            let path = self.dir.join(format!("{name}.json"));
            let mut text = serde_json::to_string_pretty(&v).expect("json value");
            text.push('\n');
            fs::write(&path, text).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// File-name safe form of a family id: `u(0.5)` becomes `u_0.5`.
pub fn slug(id: &str) -> String {
    let mut s: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    while s.ends_with('_') {
        s.pop();
    }
    s
}
