//! JSON config files whose keys are the long flag names of a subcommand.

use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Default)]
pub struct ConfigFile(Map<String, Value>);

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(ConfigFile(map)),
            Ok(_) => Err(CliError::Usage("config must be a JSON object".into())),
            Err(e) => Err(CliError::Usage(format!("config {}: {e}", path.display()))),
        }
    }

    /// Rejects keys that are not flags of the running subcommand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Usage(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }

    /// The value of `key` as flag text. Arrays become comma lists.
    pub fn text(&self, key: &str) -> Option<String> {
        fn flat(v: &Value) -> String {
            match v {
                Value::String(s) => s.clone(),
                Value::Array(items) => items.iter().map(flat).collect::<Vec<_>>().join(","),
                other => other.to_string(),
            }
        }
        self.0.get(key).filter(|v| !v.is_null()).map(flat)
    }

    /// `flag` if given, otherwise the config value parsed as `T`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.text(key)
            .map(|t| {
                t.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config `{key}` = {t:?}: {e}")))
            })
            .transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}
