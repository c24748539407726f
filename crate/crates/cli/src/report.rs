//! Versioned analysis reports and their serializations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "driftlab-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Inputs {
    pub files: Vec<InputFile>,
    /// Command-line arguments, output location excluded.
    pub args: Vec<String>,
    pub seed: u64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: String,
    pub inputs: Inputs,
    pub effective_n: BTreeMap<String, usize>,
    pub results: Map<String, Value>,
    pub warnings: Vec<String>,
    /// Side files written next to the report.
    pub outputs: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<(String, String)>,
    #[serde(skip)]
    pub summary: String,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Inputs) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs,
            effective_n: BTreeMap::new(),
            results: Map::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
            tables: Vec::new(),
            summary: String::new(),
        }
    }

    pub fn result<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.results.insert(key.to_string(), v);
    }

    pub fn n(&mut self, key: &str, n: usize) {
        self.effective_n.insert(key.to_string(), n);
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    /// Registers a CSV side file.
    pub fn table(&mut self, name: &str, csv: String) {
        self.outputs.push(name.to_string());
        self.tables.push((name.to_string(), csv));
    }

    pub fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    pub fn render(&self, format: Format) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut s = String::new();
                for (k, v) in flatten(&value) {
                    s.push_str(&k);
                    s.push_str(" = ");
                    s.push_str(&v);
                    s.push('\n');
                }
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["key", "value"]).expect("in-memory write");
                for (k, v) in flatten(&value) {
                    w.write_record([k, v]).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
        }
    }

    /// Writes `report.<ext>` and the side tables into `dir`.
    pub fn write(&self, dir: &Path, format: Format) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let path = dir.join(format!("report.{}", format.extension()));
        fs::write(&path, self.render(format))?;
        written.push(path);
        for (name, body) in &self.tables {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "NA".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Dotted-key view of a JSON tree; array elements are indexed from 0.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) => {
                if m.is_empty() && !prefix.is_empty() {
                    out.push((prefix.to_string(), "{}".into()));
                }
                for (k, x) in m {
                    walk(&key(k), x, out);
                }
            }
            Value::Array(a) => {
                if a.is_empty() {
                    out.push((prefix.to_string(), "[]".into()));
                }
                for (i, x) in a.iter().enumerate() {
                    walk(&key(&i.to_string()), x, out);
                }
            }
            other => out.push((prefix.to_string(), scalar(other))),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

pub fn digest_file(path: &Path) -> std::io::Result<InputFile> {
    let bytes = fs::read(path)?;
    Ok(InputFile {
        path: path.display().to_string(),
        sha256: format!("{:x}", Sha256::digest(&bytes)),
        bytes: bytes.len() as u64,
    })
}
