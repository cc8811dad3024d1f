use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

/// Everything that determines a run's output. Thread count and output
/// paths are deliberately excluded.
#[derive(Serialize)]
pub struct ConfigFingerprint<'a, C: Serialize> {
    pub command: &'a C,
    pub law: &'a Option<serde_json::Value>,
    /// Contents of any auxiliary JSON input (event files).
    pub event: &'a Option<serde_json::Value>,
    pub seed: u64,
}

pub fn config_hash<C: Serialize>(fp: &ConfigFingerprint<'_, C>) -> String {
    let bytes = serde_json::to_vec(fp).expect("config serializes");
    format!("{:x}", Sha256::digest(&bytes))
}

#[derive(Serialize)]
pub struct Envelope<'a, R: Serialize> {
    pub version: &'static str,
    pub config_hash: &'a str,
    pub seed: u64,
    pub command: &'a str,
    pub report: R,
}

pub fn emit<R: Serialize>(env: &Envelope<'_, R>, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(env).map_err(|e| Failure::Config(e.to_string()))?;
    println!("{text}");
    if let Some(p) = out {
        std::fs::write(p, text + "\n").map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

/// RFC 4180 CSV with a header row.
pub fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Config(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Config(e.to_string()))
}
