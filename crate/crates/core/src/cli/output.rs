//! CSV bodies and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// 17 significant digits, enough to reproduce every `f64` exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV file held in memory until the run is complete.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvFile {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_header(name: impl Into<String>, header: Vec<String>) -> Self {
        Self { name: name.into(), header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|&x| fmt_float(x)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `contents` under `dir` and returns its checksum record.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> std::io::Result<FileRecord> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(FileRecord { name: name.to_string(), sha256: sha256_hex(contents.as_bytes()), bytes: contents.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Everything needed to audit a run: inputs in both unit systems, check
/// results, outputs with checksums, and timings.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub status: String,
    pub exit_code: i32,
    pub config: serde_json::Value,
    pub params_user: serde_json::Value,
    pub params_internal: serde_json::Value,
    pub checks: serde_json::Value,
    pub summary: serde_json::Value,
    pub warnings: Vec<String>,
    pub failures: Vec<String>,
    pub files: Vec<FileRecord>,
    pub timings: Vec<Timing>,
    pub output_dir: PathBuf,
}

pub const MANIFEST_NAME: &str = "manifest.json";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 22.116540457996162, 1e-300, -0.0, 6.02214076e23] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv_and_checksum() {
        let mut c = CsvFile::new("a.csv", &["x", "y"]);
        c.push(vec![1.0, 0.5]);
        assert_eq!(c.render(), "x,y\n1.0000000000000000e0,5.0000000000000000e-1\n");
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
