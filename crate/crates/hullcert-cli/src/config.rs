//! Flat key=value configuration files: one `key = value` pair per line,
//! `#` comments and blank lines ignored.

use std::collections::HashMap;
use std::path::Path;

use crate::commands::CliError;

pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn empty() -> Config {
        Config { values: HashMap::new() }
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", i + 1)))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("key {key}: expected a number, got {v}"))),
        }
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("key {key}: expected an integer, got {v}"))),
        }
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("key {key}: expected an integer, got {v}"))),
        }
    }

    pub fn get_u64_list(&self, key: &str) -> Result<Option<Vec<u64>>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map(Some)
                .map_err(|_| {
                    CliError::Config(format!("key {key}: expected comma-separated integers"))
                }),
        }
    }
}
