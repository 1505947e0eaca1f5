//! CSV tables and the JSON manifest that accompanies every run.

use std::path::{Path, PathBuf};

use infoval_core::MarketParams;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

pub struct Output {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

/// Shortest round-trip form, in exponent notation for tiny or huge magnitudes.
pub fn num(x: f64) -> String {
    let m = x.abs();
    if m != 0.0 && m.is_finite() && !(1e-4..1e15).contains(&m) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Empty for a missing value.
pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn params_json(p: &MarketParams) -> Value {
    json!({
        "r": p.r, "sigma": p.sigma, "lambda": p.lambda, "sigma_x": p.sigma_x,
        "x_bar": p.x_bar, "rho": p.rho, "pi0": p.pi0, "r0": p.r0,
        "T": p.horizon, "gamma": p.gamma, "w": p.w,
    })
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: bytes.len(),
            sha256: format!("{:x}", Sha256::digest(&bytes)),
        });
        Ok(())
    }

    pub fn table<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Config(format!("{name}: {e}"));
        w.write_record(header).map_err(csv_err)?;
        for row in rows {
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        self.write(name, bytes)
    }

    /// Writes `<command>_manifest.json` listing every file with its checksum.
    pub fn finish(self, command: &str, argv: &[String], params: &MarketParams, settings: Value) -> Result<(), CliError> {
        let manifest = json!({
            "tool": "infoval",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "argv": argv,
            "params": params_json(params),
            "settings": settings,
            "files": self.files,
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        let path = self.dir.join(format!("{command}_manifest.json"));
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}
