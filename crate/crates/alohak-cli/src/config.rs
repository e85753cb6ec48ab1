//! Optional `key = value` configuration files, merged under the command
//! line: a flag given explicitly always wins, the file only fills gaps.
//! Environment variables are deliberately not consulted.

use crate::CliError;
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "{}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse `{raw}`"))),
        }
    }
}

/// `flag.or(config[key]).or(default)` with parse errors surfaced.
pub fn resolve<T: FromStr + Copy>(
    flag: Option<T>,
    cfg: &ConfigFile,
    key: &str,
    default: Option<T>,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Some(v) = cfg.get::<T>(key)? {
        return Ok(Some(v));
    }
    Ok(default)
}
