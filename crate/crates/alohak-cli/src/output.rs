//! Machine-readable output: self-describing records, CSV and JSON writers.
//!
//! Machine formats carry 10 significant digits; values are rounded before
//! serialization so CSV and JSON parse back to identical numbers. Human
//! tables round to 4 decimals.

use crate::CliError;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// One metric of one scenario, with the full parameter echo.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub scenario: String,
    pub model: String,
    pub n_users: Option<u32>,
    pub q: Option<f64>,
    pub lambda: Option<f64>,
    pub epsilon: f64,
    pub k: Option<u32>,
    pub variant: Option<String>,
    pub metric: String,
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Simulated,
    Optimizer,
}

/// Round to 10 significant digits so machine formats are precision-stable.
pub fn round_sig10(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}")
        .parse()
        .expect("scientific notation round-trips")
}

pub fn write_csv<W: Write>(records: &[OutputRecord], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)
            .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

/// Top-level JSON envelope: `parameters`, `results`, `meta`.
pub fn json_envelope(
    command: &str,
    parameters: serde_json::Value,
    results: serde_json::Value,
    seed: Option<u64>,
) -> serde_json::Value {
    serde_json::json!({
        "parameters": parameters,
        "results": results,
        "meta": {
            "tool": "alohak",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": seed,
        },
    })
}

pub fn print_json(value: &serde_json::Value) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)
        .map_err(|e| CliError::Io(std::io::Error::other(e)))?;
    writeln!(stdout)?;
    Ok(())
}

/// Write `content` to `path`, or to stdout when no path is given. Output is
/// built fully before this is called, so errors never leave partial files
/// behind on the happy path.
pub fn emit(path: Option<&Path>, content: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
        None => {
            std::io::stdout().lock().write_all(content)?;
            Ok(())
        }
    }
}

/// 4-decimal human rendering used by table output.
pub fn human(v: f64) -> String {
    format!("{v:.4}")
}
