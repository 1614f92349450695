//! Report directory handling: CSV artifacts with fixed column orders plus a
//! versioned JSON summary embedding the exact config and library version.

use std::fs;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SUMMARY_SCHEMA: u32 = 1;

pub struct Report {
    dir: PathBuf,
    config: ExperimentConfig,
    fields: Value,
}

impl Report {
    pub fn create(dir: PathBuf, config: &ExperimentConfig) -> Result<Self, CliError> {
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, config: config.clone(), fields: Value::Null })
    }

    pub fn write_raw(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        fs::write(self.dir.join(name), bytes)?;
        Ok(())
    }

    pub fn summary(&mut self, fields: Value) -> Result<(), CliError> {
        self.fields = fields;
        Ok(())
    }

    /// Writes `summary.json`. The timestamp lives here and only here, so CSV
    /// bodies stay byte-identical across reruns.
    pub fn finish(self) -> Result<(), CliError> {
        let now_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        let doc = json!({
            "schema_version": SUMMARY_SCHEMA,
            "library_version": offwhite::VERSION,
            "generated_unix_ms": now_ms,
            "config": self.config,
            "results": self.fields,
        });
        fs::write(
            self.dir.join("summary.json"),
            serde_json::to_string_pretty(&doc)?,
        )?;
        Ok(())
    }
}
