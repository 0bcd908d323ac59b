use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
pub struct Envelope<'a, P: Serialize> {
    pub schema_version: &'static str,
    pub command: &'a str,
    pub params: Value,
    pub payload: P,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<Value>,
}

/// 17 significant digits, enough to round-trip any `f64`. Negative zero
/// prints as zero.
pub fn float(v: f64) -> String {
    if v == 0.0 {
        "0.0000000000000000e0".into()
    } else if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }
}

pub fn json_bytes<P: Serialize>(env: &Envelope<'_, P>) -> io::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(env)?;
    out.push(b'\n');
    Ok(out)
}

/// Writes to `path`, or stdout when absent.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes)?;
            lock.flush()
        }
    }
}
