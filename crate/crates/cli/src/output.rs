//! Output documents: a commented header, then CSV rows or one JSON object.

use std::io::Write;
use std::path::PathBuf;

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::config::CONFIG_PREFIX;
use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "NEUROQUANT_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(t) => json!(t),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Cell::Num(v) => v.is_finite(),
            _ => true,
        }
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// Results of one run, renderable in either format.
pub struct Report {
    pub table: Table,
    /// Scalar results: header lines in CSV, a `results` object in JSON.
    pub results: Vec<(&'static str, Cell)>,
    /// Replaces the default `{columns, rows, results}` JSON body.
    pub data: Option<Value>,
    pub rng: Option<&'static str>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>, rows: Vec<Vec<Cell>>) -> Self {
        Self { table: Table { columns, rows }, results: Vec::new(), data: None, rng: None }
    }

    pub fn result(mut self, key: &'static str, value: Cell) -> Self {
        self.results.push((key, value));
        self
    }

    pub fn first_non_finite(&self) -> Option<String> {
        for row in &self.table.rows {
            for (c, cell) in self.table.columns.iter().zip(row) {
                if !cell.is_finite() {
                    return Some(c.to_string());
                }
            }
        }
        self.results.iter().find(|(_, v)| !v.is_finite()).map(|(k, _)| k.to_string())
    }

    fn json_body(&self) -> Value {
        if let Some(d) = &self.data {
            return d.clone();
        }
        let rows: Vec<Value> =
            self.table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let results: Map<String, Value> = self.results.iter().map(|(k, v)| (k.to_string(), v.json())).collect();
        json!({ "columns": self.table.columns, "rows": rows, "results": results })
    }
}

pub struct Header {
    pub subcommand: &'static str,
    pub seed: Option<u64>,
    pub config: String,
    pub hash: String,
}

/// Shortest round-trip decimal; scientific outside [1e-4, 1e7).
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn render(report: &Report, header: &Header, format: Format) -> String {
    let version = env!("CARGO_PKG_VERSION");
    let seed = header.seed.map_or("none".to_string(), |s| s.to_string());
    match format {
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!("# neuroquant {version} {}\n", header.subcommand));
            s.push_str(&format!("# seed: {seed}\n"));
            if let Some(rng) = report.rng {
                s.push_str(&format!("# rng: {rng}\n"));
            }
            s.push_str(&format!("# config-sha256: {}\n", header.hash));
            s.push_str(&format!("{CONFIG_PREFIX}{}\n", header.config));
            for (k, v) in &report.results {
                s.push_str(&format!("# result {k}: {}\n", v.csv()));
            }
            s.push_str(&report.table.columns.join(","));
            s.push('\n');
            for row in &report.table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let config: Value = serde_json::from_str(&header.config).expect("echoed config is json");
            let mut meta = Map::new();
            meta.insert("version".into(), json!(version));
            meta.insert("subcommand".into(), json!(header.subcommand));
            meta.insert("seed".into(), header.seed.map_or(Value::Null, |s| json!(s)));
            if let Some(rng) = report.rng {
                meta.insert("rng".into(), json!(rng));
            }
            meta.insert("config-sha256".into(), json!(header.hash));
            meta.insert("config".into(), config);
            let doc = json!({ "meta": meta, "data": report.json_body() });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
    }
}

/// `--out`, else `$NEUROQUANT_OUT_DIR/<subcommand>.<ext>`, else stdout.
pub fn destination(out: Option<PathBuf>, subcommand: &str, format: Format) -> Option<PathBuf> {
    out.or_else(|| {
        std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty()).map(|dir| {
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            PathBuf::from(dir).join(format!("{subcommand}.{ext}"))
        })
    })
}

pub fn write(text: &str, dest: Option<PathBuf>) -> Result<(), CliError> {
    match dest {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}
