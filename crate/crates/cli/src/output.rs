//! Deterministic CSV/JSON rendering, atomic file output and run manifests.
//!
//! Floats are written with 17 significant digits in exponent form
//! (`{:.16e}`), non-finite floats as `null` (JSON) or an empty field (CSV).
//! JSON object keys are sorted. Lines end in `\n`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

fn render_number(n: &serde_json::Number, out: &mut String) {
    if n.is_f64() {
        let v = n.as_f64().expect("f64 number");
        out.push_str(&float(v));
    } else {
        out.push_str(&n.to_string());
    }
}

fn render_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => render_number(n, out),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                render_json(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let keys: Vec<&String> = map.keys().collect();
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                render_json(&map[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn json_string(v: &Value) -> String {
    let mut out = String::new();
    render_json(v, 0, &mut out);
    out.push('\n');
    out
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i128),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
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

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Two-row table (header, values) from the scalar fields of a flat
    /// object; nested values are skipped.
    pub fn from_record(value: &Value) -> Self {
        let mut table = Table::default();
        let mut row = Vec::new();
        if let Value::Object(map) = value {
            for (k, v) in map {
                let cell = match v {
                    Value::Number(n) if n.is_f64() => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
                    Value::Number(n) => Cell::Int(n.as_i64().map_or_else(
                        || n.as_u64().unwrap_or_default() as i128,
                        i128::from,
                    )),
                    Value::Bool(b) => Cell::Bool(*b),
                    Value::String(s) => Cell::Text(s.clone()),
                    Value::Null => Cell::Float(f64::NAN),
                    _ => continue,
                };
                table.header.push(k.clone());
                row.push(cell);
            }
        }
        table.rows.push(row);
        table
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Float(v) => float(*v),
                    Cell::Int(v) => v.to_string(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => {
                        format!("\"{}\"", s.replace('"', "\"\""))
                    }
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Result of one command: a JSON document and its tabular view.
pub struct Report {
    pub json: Value,
    pub table: Table,
}

impl Report {
    pub fn new(value: &impl Serialize, table: Table) -> Result<Self> {
        Ok(Self {
            json: serde_json::to_value(value)?,
            table,
        })
    }

    /// Report whose CSV view is the record's own scalar fields.
    pub fn record(value: &impl Serialize) -> Result<Self> {
        let json = serde_json::to_value(value)?;
        let table = Table::from_record(&json);
        Ok(Self { json, table })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub zero_table_digest: Option<String>,
    pub constants_prime_limit: u64,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub run_id: String,
    pub wall_time_seconds: f64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: BTreeMap<String, String>,
        zero_table_digest: Option<String>,
        constants_prime_limit: u64,
        seed: Option<u64>,
    ) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        for (k, v) in &parameters {
            h.update(format!("\0{k}={v}").as_bytes());
        }
        h.update(format!(
            "\0{}\0{constants_prime_limit}\0{}\0{TOOL_VERSION}",
            zero_table_digest.as_deref().unwrap_or(""),
            seed.map(|s| s.to_string()).unwrap_or_default()
        ));
        let run_id: String = h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect();
        Self {
            command: command.to_string(),
            parameters,
            zero_table_digest,
            constants_prime_limit,
            seed,
            tool_version: TOOL_VERSION.to_string(),
            run_id,
            wall_time_seconds: 0.0,
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("cannot write {}", path.display()))
}

/// Renders the report and writes it (and its manifest) to `out`, or prints
/// it to stdout without a manifest.
pub fn emit(
    report: &Report,
    format: Format,
    out: Option<&Path>,
    mut manifest: RunManifest,
    elapsed: Duration,
) -> Result<()> {
    let manifest_file = out.map(manifest_path);
    let body = match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => {
            let reference = manifest_file
                .as_ref()
                .and_then(|p| p.file_name())
                .map(|n| Value::String(n.to_string_lossy().into_owned()))
                .unwrap_or(Value::Null);
            let doc = serde_json::json!({
                "manifest": reference,
                "run_id": manifest.run_id,
                "command": manifest.command,
                "result": report.json,
            });
            json_string(&doc)
        }
    };
    match (out, manifest_file) {
        (Some(path), Some(mpath)) => {
            write_atomic(path, &body)?;
            manifest.wall_time_seconds = elapsed.as_secs_f64();
            write_atomic(&mpath, &json_string(&serde_json::to_value(&manifest)?))?;
        }
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        assert_eq!(float(f64::NAN), "");
        let v: f64 = float(std::f64::consts::PI).parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }

    #[test]
    fn json_is_sorted_and_parseable() {
        let v = serde_json::json!({"b": 1.5, "a": [1, 2.0, null], "c": {"z": true, "y": "s"}});
        let s = json_string(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], serde_json::json!(1.5));
        assert_eq!(back["c"]["y"], "s");
        let nan = serde_json::to_value(f64::NAN).unwrap();
        assert_eq!(json_string(&nan), "null\n");
    }

    #[test]
    fn csv_rendering() {
        let mut t = Table::new(&["x", "name", "ok", "n"]);
        t.push(vec![1.0.into(), "a,b".into(), true.into(), 3usize.into()]);
        assert_eq!(t.to_csv(), "x,name,ok,n\n1.0000000000000000e0,\"a,b\",true,3\n");
    }

    #[test]
    fn record_table_skips_nested() {
        let v = serde_json::json!({"a": 1.0, "b": [1], "c": 2});
        let t = Table::from_record(&v);
        assert_eq!(t.header, vec!["a", "c"]);
    }

    #[test]
    fn manifest_ids_are_stable() {
        let mut p = BTreeMap::new();
        p.insert("x".to_string(), "10".to_string());
        let a = RunManifest::new("eval", p.clone(), None, 10, None);
        let b = RunManifest::new("eval", p, None, 10, None);
        assert_eq!(a.run_id, b.run_id);
        let c = RunManifest::new("eval", BTreeMap::new(), None, 10, None);
        assert_ne!(a.run_id, c.run_id);
        assert_eq!(
            manifest_path(Path::new("/tmp/out.csv")),
            PathBuf::from("/tmp/out.csv.manifest.json")
        );
    }
}
