//! Run manifests: the machine-readable record every scenario writes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_name: String,
    pub state_index: Option<usize>,
    pub value: f64,
    pub target: f64,
    pub abs_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Build a check from a measured value against a target.
    pub fn against(name: &str, state: Option<usize>, value: f64, target: f64, tol: f64) -> Self {
        let abs_err = (value - target).abs();
        Check {
            check_name: name.to_string(),
            state_index: state,
            value,
            target,
            abs_err,
            tolerance: tol,
            pass: abs_err <= tol,
        }
    }

    /// Build a check from an error magnitude that must stay below `tol`.
    pub fn bound(name: &str, state: Option<usize>, err: f64, tol: f64) -> Self {
        Check {
            check_name: name.to_string(),
            state_index: state,
            value: err,
            target: 0.0,
            abs_err: err,
            tolerance: tol,
            pass: err <= tol,
        }
    }
}

/// Versions of the participating crates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub zpflab_core: String,
    pub zpflab_cli: String,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            // Workspace-versioned: both crates share the package version.
            zpflab_core: env!("CARGO_PKG_VERSION").to_string(),
            zpflab_cli: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// The run manifest written next to the artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub scenario: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub versions: Versions,
    pub wall_time_s: f64,
    pub n_pass: usize,
    pub n_fail: usize,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub fn new(scenario: &str, config_hash: String, seed: Option<u64>) -> Self {
        Manifest {
            scenario: scenario.to_string(),
            config_hash,
            seed,
            versions: Versions::default(),
            wall_time_s: 0.0,
            n_pass: 0,
            n_fail: 0,
            checks: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn push_check(&mut self, check: Check) {
        if check.pass {
            self.n_pass += 1;
        } else {
            self.n_fail += 1;
        }
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.n_fail == 0
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let body =
            serde_json::to_string_pretty(self).map_err(|e| CliError::Environment(e.to_string()))?;
        std::fs::write(dir.join("manifest.json"), body + "\n")?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("manifest `{}`: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("manifest `{}`: {e}", path.display())))
    }
}
