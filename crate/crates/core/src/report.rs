//! Versioned JSON report of a verification run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::actions::{Couplings, IdentityReport, Residual};
use crate::error::Result;
use crate::suite::{Fault, SeedRange};

pub const SCHEMA: u32 = 1;

/// One property check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    pub check: String,
    pub algebra: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub residual: Residual,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
    pub inputs_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

/// The resolved run parameters, echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub suites: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebras: Option<Vec<String>>,
    pub seeds: SeedRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<Couplings>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u16>,
    pub grids: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub config: ReportConfig,
    pub summary: Summary,
    pub identities: Vec<IdentityReport>,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(config: ReportConfig) -> Report {
        Report {
            schema: SCHEMA,
            tool: "symcartan".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            summary: Summary::default(),
            identities: Vec::new(),
            checks: Vec::new(),
            wall_time_ms: None,
        }
    }

    /// Recomputes the summary.
    pub fn finish(&mut self, wall_time_ms: Option<f64>) {
        let flags: Vec<bool> =
            self.identities.iter().map(|r| r.passed).chain(self.checks.iter().map(|c| c.passed)).collect();
        let passed = flags.iter().filter(|&&p| p).count();
        self.summary = Summary { total: flags.len(), passed, failed: flags.len() - passed };
        self.wall_time_ms = wall_time_ms;
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Digests of every failed entry, in report order.
    pub fn failing_digests(&self) -> Vec<&str> {
        self.identities
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.inputs_digest.as_str())
            .chain(self.checks.iter().filter(|c| !c.passed).map(|c| c.inputs_digest.as_str()))
            .collect()
    }

    /// Pretty JSON with a trailing newline. Key order follows the struct
    /// declarations, so equal reports serialize to equal bytes.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Report> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}
