use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenarios::Check;

pub const MANIFEST_NAME: &str = "manifest.json";

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the output directory.
    pub path: String,
    pub bytes: u64,
    /// FNV-1a 64 checksum as 16 lowercase hex digits.
    pub checksum: String,
}

impl FileRecord {
    pub fn of(dir: &Path, name: &str) -> Result<Self> {
        let path = dir.join(name);
        let data = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            path: name.to_string(),
            bytes: data.len() as u64,
            checksum: format!("{:016x}", fnv1a64(&data)),
        })
    }

    /// Whether the file under `dir` still has the recorded length and checksum.
    pub fn verify(&self, dir: &Path) -> bool {
        FileRecord::of(dir, &self.path).is_ok_and(|now| now == *self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl From<&Check> for CheckRecord {
    fn from(c: &Check) -> Self {
        Self {
            name: c.name.clone(),
            passed: c.passed,
            detail: c.detail.clone(),
        }
    }
}

/// Record of a completed run; written after every other file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub files: Vec<FileRecord>,
    pub wall_clock_seconds: f64,
    pub checks: Vec<CheckRecord>,
    pub all_passed: bool,
}

impl RunManifest {
    pub fn new(command: &str, config: &super::ScenarioConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.pairs().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            files: Vec::new(),
            wall_clock_seconds: 0.0,
            checks: Vec::new(),
            all_passed: true,
        }
    }

    pub fn set_checks(&mut self, checks: &[Check]) {
        self.checks = checks.iter().map(CheckRecord::from).collect();
        self.all_passed = checks.iter().all(|c| c.passed);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        super::csv::write_file(&dir.join(MANIFEST_NAME), self.to_json().as_bytes())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}
