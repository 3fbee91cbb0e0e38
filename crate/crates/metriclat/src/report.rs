//! The common JSON report schema and atomic file emission.
//!
//! Every runner artifact is a `metriclat/1` document: named checks with
//! residuals and tolerances, fully determined by the command parameters and
//! the seed. The `timestamp` field is the only part excluded from the
//! reproducibility contract. Files are written atomically (temp file in the
//! target directory, then rename).

use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::Result;

/// Schema tag carried by every emitted JSON document.
pub const SCHEMA: &str = "metriclat/1";

/// One named verification with its measured residual.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    /// The claim being checked, in plain words.
    pub claim: String,
}

impl CheckResult {
    /// A check that passes when `residual <= tolerance`.
    pub fn residual_check(
        name: impl Into<String>,
        claim: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        CheckResult {
            name: name.into(),
            passed: residual <= tolerance,
            residual,
            tolerance,
            claim: claim.into(),
        }
    }

    /// A check whose measured value must reach at least `threshold`
    /// (recorded with `residual = value`, `tolerance = threshold`).
    pub fn lower_bound_check(
        name: impl Into<String>,
        claim: impl Into<String>,
        value: f64,
        threshold: f64,
    ) -> Self {
        CheckResult {
            name: name.into(),
            passed: value >= threshold,
            residual: value,
            tolerance: threshold,
            claim: claim.into(),
        }
    }
}

/// Top-level report document.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub timestamp: u64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Report {
            schema: SCHEMA,
            command: command.into(),
            seed,
            params: BTreeMap::new(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            checks: Vec::new(),
            passed: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn push(&mut self, check: CheckResult) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckResult>) {
        for c in checks {
            self.push(c);
        }
    }
}

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = PathBuf::from(dir);
    tmp.push(format!(
        ".{}.tmp{}",
        path.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into()),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Serializes a value to pretty JSON and writes it atomically.
pub fn atomic_write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    atomic_write(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_tracks_pass_state() {
        let mut r = Report::new("demo", 0);
        r.push(CheckResult::residual_check("a", "small", 1e-12, 1e-10));
        assert!(r.passed);
        r.push(CheckResult::residual_check("b", "small", 1e-2, 1e-10));
        assert!(!r.passed);
        assert_eq!(r.checks.len(), 2);
    }

    #[test]
    fn atomic_write_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("report.json");
        let mut r = Report::new("demo", 7);
        r.param("n", 32);
        atomic_write_json(&path, &r).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["schema"], "metriclat/1");
        assert_eq!(value["seed"], 7);
        assert_eq!(value["params"]["n"], 32);
    }

    #[test]
    fn lower_bound_check_direction() {
        let c = CheckResult::lower_bound_check("min", "at least 1", 1.2, 1.0);
        assert!(c.passed);
        let c = CheckResult::lower_bound_check("min", "at least 1", 0.8, 1.0);
        assert!(!c.passed);
    }
}
