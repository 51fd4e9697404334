//! Flat JSON run configuration. Command-line values take precedence over
//! the file; keys absent from both fall back to per-command defaults.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;

/// Every key any command understands. Anything else in a config file is
/// rejected so typos do not silently fall back to defaults.
pub const KNOWN_KEYS: &[&str] = &[
    "A",
    "seed",
    "chart",
    "direction",
    "s_max",
    "r_stop",
    "r_max",
    "tol",
    "step",
    "adaptive",
    "oracle",
    "seeds",
    "mode",
    "R0",
    "T",
    "n",
    "rng_seed",
    "margin",
    "L",
    "k_max",
    "m_max",
    "mellin_xi",
    "k",
    "tau",
    "r_start",
    "r_end",
    "points",
    "u0",
    "du0",
    "upsilon",
    "b",
    "side",
    "s1",
    "r0",
    "out",
    "format",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: Map<String, Value>,
}

impl Config {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?;
        let Value::Object(values) = value else {
            return Err(CliError::Usage("config must be a JSON object".into()));
        };
        if let Some(k) = values.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key {k:?}")));
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    fn lookup<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key:?}: {e}"))),
        }
    }

    /// Command-line value, else config value, else `None`.
    pub fn get<T: DeserializeOwned>(
        &self,
        cli: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.lookup(key),
        }
    }

    pub fn require<T: DeserializeOwned>(&self, cli: Option<T>, key: &str) -> Result<T, CliError> {
        self.get(cli, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required setting {key:?}")))
    }

    pub fn or<T: DeserializeOwned>(
        &self,
        cli: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        Ok(self.get(cli, key)?.unwrap_or(default))
    }

    /// Boolean flags: set on the command line, or `true` in the file.
    pub fn flag(&self, cli: bool, key: &str) -> Result<bool, CliError> {
        Ok(cli || self.lookup::<bool>(key)?.unwrap_or(false))
    }
}
