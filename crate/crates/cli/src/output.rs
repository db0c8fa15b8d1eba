//! CSV tables and the metadata sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// One CSV cell. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, PartialEq)]
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

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
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

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(v) => format!("{v:?}"),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::F(v) => Some(*v),
            Cell::I(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self {
            name: name.to_string(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Result of one experiment: tables plus a JSON summary.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub kind: String,
    pub tables: Vec<Table>,
    pub summary: Value,
    pub wall_seconds: f64,
}

impl RunRecord {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `<table>.csv` for every table and `<kind>.meta.json`.
    pub fn write(&self, dir: &Path, config: &Value) -> anyhow::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            fs::write(&path, t.to_csv()?)?;
            written.push(path);
        }
        let meta = json!({
            "kind": self.kind,
            "engine_version": env!("CARGO_PKG_VERSION"),
            "config": config,
            "calibration": calibration(),
            "summary": self.summary,
            "wall_seconds": self.wall_seconds,
            "tables": self.tables.iter().map(|t| format!("{}.csv", t.name)).collect::<Vec<_>>(),
        });
        let path = dir.join(format!("{}.meta.json", self.kind));
        fs::write(&path, serde_json::to_string_pretty(&meta)? + "\n")?;
        written.push(path);
        Ok(written)
    }
}

pub fn calibration() -> Value {
    json!({
        "spectrum_scale": atomchain::fermion::SPECTRUM_SCALE,
        "generator_scale": atomchain::fermion::GENERATOR_SCALE,
        "purity_scale": atomchain::dynamics::PURITY_SCALE,
        "kappa": atomchain::protocols::KAPPA,
        "integrator": "fourth-order commutator-free Magnus, Gauss nodes; Gaussian exponentials by fourth-order Suzuki splitting, oracle exponentials by Taylor series",
        "reorthonormalization_interval": atomchain::dynamics::REORTH_INTERVAL,
    })
}
