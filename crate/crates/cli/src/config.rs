//! Per-command run configuration: a JSON object from `--config` with
//! command-line flags layered on top.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Merge `flags` over the object in `config`. Keys absent from both stay
/// at their serde defaults; keys the command does not know are rejected.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> CliResult<T> {
    let mut merged = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config(e).context(format!("reading config {}", path.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => return Err(CliError::config(anyhow!("config {} must be a JSON object", path.display()))),
                Err(e) => return Err(CliError::config(e).context(format!("parsing config {}", path.display()))),
            }
        }
        None => Map::new(),
    };
    if let Value::Object(set) = serde_json::to_value(flags)? {
        for (key, value) in set {
            if !value.is_null() {
                merged.insert(key, value);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::config(anyhow!("invalid configuration: {e}")))
}

pub fn required<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::config(anyhow!("missing required setting `{key}` (flag --{})", key.replace('_', "-"))))
}

pub fn open_input(path: &Path) -> CliResult<fs::File> {
    fs::File::open(path).map_err(|e| CliError::config(e).context(format!("opening {}", path.display())))
}

pub fn create_output(path: &PathBuf) -> CliResult<std::io::BufWriter<fs::File>> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::config(e).context(format!("creating {}", path.display())))
}
