//! Optional JSON configuration file.  Precedence is command-line flags,
//! then config-file values, then built-in defaults.

use serde::Deserialize;
use std::path::Path;

use crate::fail::Failure;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Grid size for `simulate` (angles per axis).
    pub grid: Option<usize>,
    /// Shots per setting for `simulate`.
    pub shots: Option<u64>,
    /// Base seed for every seeded command.
    pub seed: Option<u64>,
    /// Multi-start restarts for `qpt` and `characterize`.
    pub restarts: Option<usize>,
    /// Sigma multiplier for `validate`.
    pub k: Option<f64>,
    /// Boundary directions for `boundary`.
    pub n: Option<usize>,
    /// Worker threads (same as --threads / DICHANNEL_THREADS).
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, Failure> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))
    }
}

/// `flag` beats `config` beats `default`.
pub fn resolve<T: Copy>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
