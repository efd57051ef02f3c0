//! Run manifests: what was run, with which parameters and seed, and what it wrote.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::io::{manifest_path, write_plain_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Command line after merging `--config`, enough to re-run.
    pub argv: Vec<String>,
    /// Resolved parameters, defaults included.
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub versions: BTreeMap<String, String>,
    pub started_unix_secs: u64,
    pub wall_clock_secs: f64,
    pub outputs: Vec<String>,
    pub status: String,
}

/// Collects a manifest while a command runs.
pub struct ManifestBuilder {
    manifest: RunManifest,
    started: Instant,
}

impl ManifestBuilder {
    pub fn start(command: &str, argv: &[String], parameters: serde_json::Value) -> Self {
        let started_unix_secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let versions = BTreeMap::from([
            ("urnfield".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("urnfield-core".to_string(), urnfield_core::VERSION.to_string()),
        ]);
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                argv: argv.to_vec(),
                parameters,
                seed: None,
                versions,
                started_unix_secs,
                wall_clock_secs: 0.0,
                outputs: Vec::new(),
                status: "ok".into(),
            },
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    pub fn status(&mut self, status: impl Into<String>) {
        self.manifest.status = status.into();
    }

    /// Writes the manifest next to the primary output `out`.
    pub fn finish(mut self, out: &Path) -> Result<PathBuf, CliError> {
        self.manifest.wall_clock_secs = self.started.elapsed().as_secs_f64();
        self.manifest.outputs.push(out.display().to_string());
        let path = manifest_path(out);
        write_plain_json(&path, &self.manifest)?;
        Ok(path)
    }
}
