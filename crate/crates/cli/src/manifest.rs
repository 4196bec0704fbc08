use std::fs;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Reads a JSON object from `path`, or an empty object when there is none.
pub fn load_object(path: Option<&Path>) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::user(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(CliError::user(format!("{}: {e}", path.display()))),
    }
}

/// Sets `key` when the flag was given.
pub fn overlay<T: Serialize>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        map.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialize"));
    }
}

pub fn resolve<T: serde::de::DeserializeOwned>(map: Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(map)).map_err(|e| CliError::user(format!("invalid config: {e}")))
}

pub fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Internal(format!("{}: {e}", dir.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

/// Everything needed to rerun: the argv, the resolved config and its seed.
#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize, S: Serialize> {
    pub command: Vec<String>,
    pub version: &'static str,
    pub seed: u64,
    pub config: &'a C,
    pub wall_time_s: f64,
    /// File names inside the run directory.
    pub outputs: Vec<String>,
    pub summary: S,
}

impl<'a, C: Serialize, S: Serialize> Manifest<'a, C, S> {
    pub fn new(seed: u64, config: &'a C, wall: Duration, outputs: Vec<String>, summary: S) -> Self {
        Manifest {
            command: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            wall_time_s: wall.as_secs_f64(),
            outputs,
            summary,
        }
    }

    /// Writes `config.json` and `manifest.json` into `dir`.
    pub fn write(mut self, dir: &Path) -> Result<(), CliError> {
        write_json(&dir.join("config.json"), self.config)?;
        self.outputs.push("config.json".into());
        self.outputs.push("manifest.json".into());
        write_json(&dir.join("manifest.json"), &self)
    }
}
