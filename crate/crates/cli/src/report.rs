//! Report assembly and emission. Every JSON report carries the tool version,
//! the resolved configuration, and a checksum per input file, so a run is
//! reproducible from its own output. Reports are byte-identical for
//! identical configurations and inputs: no timestamps, and JSON objects
//! serialize with sorted keys.

use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputChecksum {
    pub path: String,
    pub sha256: String,
}

/// A plain table for the lossy CSV flattening of tabular payloads.
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub config: Value,
    pub inputs: Vec<InputChecksum>,
    pub payload: Value,
    pub csv: Option<CsvTable>,
}

pub fn checksum_file(path: &Path) -> Result<InputChecksum> {
    let file = File::open(path).with_context(|| format!("{}", path.display()))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = reader.read(&mut buf).with_context(|| format!("{}", path.display()))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(InputChecksum {
        path: path.display().to_string(),
        sha256: hex::encode(hasher.finalize()),
    })
}

pub fn checksum_files<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<Vec<InputChecksum>> {
    paths.into_iter().map(|p| checksum_file(p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitFormat {
    Json,
    Csv,
}

/// Write the report to `out` (or stdout). JSON is the canonical format; CSV
/// is only available for commands with a tabular payload.
pub fn emit(report: &Report, format: EmitFormat, out: Option<&Path>) -> Result<()> {
    let body = match format {
        EmitFormat::Json => {
            let envelope = json!({
                "tool": {
                    "name": "guessmetrics",
                    "version": env!("CARGO_PKG_VERSION"),
                },
                "config": report.config,
                "inputs": report.inputs,
                "report": report.payload,
            });
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            s
        }
        EmitFormat::Csv => {
            let table = report
                .csv
                .as_ref()
                .context("this command has no CSV flattening; use --emit json")?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    match out {
        Some(path) => {
            let mut f = File::create(path).with_context(|| format!("{}", path.display()))?;
            f.write_all(body.as_bytes())?;
        }
        None => {
            std::io::stdout().write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

/// Render a float for CSV cells exactly as JSON would, so the two formats
/// never disagree.
pub fn float_cell(v: f64) -> String {
    serde_json::Number::from_f64(v).map_or_else(|| v.to_string(), |n| n.to_string())
}
