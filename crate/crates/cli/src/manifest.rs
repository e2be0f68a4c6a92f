use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rsbench::atomic::write_atomic;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliResult;

/// Bumped whenever a report's columns change.
pub const SCHEMA_VERSION: u32 = 1;

pub const MANIFEST_FILE: &str = "manifest.json";

/// One per invocation, written last next to the outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub toolkit_version: String,
    pub schema_version: u32,
    pub seed: u64,
    pub config: Value,
    pub inputs: Vec<PathBuf>,
    /// Output files relative to the output directory.
    pub outputs: Vec<String>,
    /// Column names of every CSV output.
    pub columns: BTreeMap<String, Vec<String>>,
    /// Command-specific diagnostics.
    pub summary: BTreeMap<String, Value>,
    pub started_unix_secs: u64,
    pub duration_secs: f64,
}

pub struct Recorder {
    manifest: RunManifest,
    started: Instant,
}

impl Recorder {
    pub fn new(command: &str, seed: u64, config: Value) -> Self {
        let started_unix_secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            manifest: RunManifest {
                command: command.to_string(),
                toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
                schema_version: SCHEMA_VERSION,
                seed,
                config,
                inputs: Vec::new(),
                outputs: Vec::new(),
                columns: BTreeMap::new(),
                summary: BTreeMap::new(),
                started_unix_secs,
                duration_secs: 0.0,
            },
            started: Instant::now(),
        }
    }

    pub fn input(&mut self, path: &Path) {
        self.manifest.inputs.push(path.to_path_buf());
    }

    pub fn output(&mut self, name: &str) {
        self.manifest.outputs.push(name.to_string());
    }

    pub fn csv_output(&mut self, name: &str, columns: &[&str]) {
        self.output(name);
        self.manifest
            .columns
            .insert(name.to_string(), columns.iter().map(|c| c.to_string()).collect());
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Value>) {
        self.manifest.summary.insert(key.to_string(), value.into());
    }

    pub fn finish(mut self, out_dir: &Path) -> CliResult<RunManifest> {
        self.manifest.duration_secs = self.started.elapsed().as_secs_f64();
        let mut json = serde_json::to_string_pretty(&self.manifest).map_err(rsbench::Error::from)?;
        json.push('\n');
        write_atomic(out_dir.join(MANIFEST_FILE), json.as_bytes())?;
        Ok(self.manifest)
    }
}
