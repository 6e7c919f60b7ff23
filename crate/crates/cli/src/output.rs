//! Number formatting, run manifests and file emission.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "means-sharp/1";

/// Shortest decimal that parses back to the same double, with `.` as the
/// separator and an exponent only for very large or small magnitudes.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, params: Value, seed: Option<u64>) -> Self {
        Manifest {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            outputs: Vec::new(),
        }
    }
}

/// Failure to write an output; the caller maps it to a usage exit code.
#[derive(Debug)]
pub struct WriteError {
    pub path: PathBuf,
    pub source: io::Error,
}

impl std::fmt::Display for WriteError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cannot write {}: {}", self.path.display(), self.source)
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), WriteError> {
    fs::write(path, bytes).map_err(|source| WriteError {
        path: path.to_path_buf(),
        source,
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json values serialize");
    out.push(b'\n');
    out
}

/// Wrap `body` with the schema tag and manifest, then print it or write it
/// to `output`.
pub fn emit_json(
    mut manifest: Manifest,
    key: &str,
    body: impl Serialize,
    output: Option<&Path>,
) -> Result<(), WriteError> {
    if let Some(path) = output {
        manifest.outputs.push(path.display().to_string());
    }
    let doc = json!({
        "schema": SCHEMA,
        "manifest": manifest,
        key: body,
    });
    let bytes = pretty(&doc);
    match output {
        Some(path) => write_file(path, &bytes),
        None => {
            io::stdout().write_all(&bytes).ok();
            Ok(())
        }
    }
}

/// Write a CSV table. A file gets a `<file>.manifest.json` beside it;
/// stdout gets the table alone.
pub fn emit_csv(
    mut manifest: Manifest,
    header: &[String],
    rows: &[Vec<f64>],
    output: Option<&Path>,
) -> Result<(), WriteError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|&v| number(v)))
            .expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    match output {
        Some(path) => {
            write_file(path, &bytes)?;
            manifest.outputs.push(path.display().to_string());
            let doc = json!({ "schema": SCHEMA, "manifest": manifest });
            write_file(&sidecar(path), &pretty(&doc))
        }
        None => {
            io::stdout().write_all(&bytes).ok();
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [2.5, 0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.75, 1e-5, 5e-324] {
            let s = number(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(number(2.5), "2.5");
        assert_eq!(number(1e-300), "1e-300");
    }
}
