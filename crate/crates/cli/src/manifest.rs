use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

/// Record of one run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: String,
    pub command: String,
    /// Every flag value the command ran with, defaults included.
    pub params: serde_json::Value,
    pub out: String,
    pub version: String,
    /// Seconds since the Unix epoch. The only field that differs between
    /// reruns.
    pub timestamp: u64,
    /// Output files relative to `out`.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(config: &Path, command: &str, params: serde_json::Value, out: &Path) -> Self {
        RunManifest {
            config: config.display().to_string(),
            command: command.to_string(),
            params,
            out: out.display().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, out: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(out.join("manifest.json"), text + "\n")
    }
}
