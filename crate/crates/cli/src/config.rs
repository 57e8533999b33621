//! Flat numeric parameter maps: defaults, JSON config file, then --param
//! overrides, with unknown keys rejected.

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical validity error: {msg}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Resolved parameters for one experiment.
pub struct Params {
    values: BTreeMap<String, f64>,
}

impl Params {
    /// Merge defaults <- config file <- command-line overrides; reject keys
    /// the experiment does not define.
    pub fn resolve(
        defaults: &[(&str, f64)],
        config_path: Option<&Path>,
        overrides: &[(String, f64)],
    ) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, f64> =
            defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();

        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let parsed: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid JSON in {}: {e}", path.display())))?;
            let object = parsed
                .as_object()
                .ok_or_else(|| CliError::Config("config must be a flat JSON object".into()))?;
            for (key, value) in object {
                let number = value.as_f64().ok_or_else(|| {
                    CliError::Config(format!("parameter {key} must be a number"))
                })?;
                if !values.contains_key(key) {
                    return Err(CliError::Config(format!("unknown parameter {key}")));
                }
                values.insert(key.clone(), number);
            }
        }

        for (key, value) in overrides {
            if !values.contains_key(key) {
                return Err(CliError::Config(format!("unknown parameter {key}")));
            }
            values.insert(key.clone(), *value);
        }

        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> f64 {
        *self
            .values
            .get(key)
            .unwrap_or_else(|| panic!("parameter {key} must have a default"))
    }

    pub fn get_usize(&self, key: &str) -> Result<usize, CliError> {
        let v = self.get(key);
        if v < 0.0 || v.fract() != 0.0 || v > 1e12 {
            return Err(CliError::Config(format!(
                "parameter {key} must be a non-negative integer, got {v}"
            )));
        }
        Ok(v as usize)
    }

    /// Ordered (key, value) pairs for metadata echoing.
    pub fn entries(&self) -> Vec<(String, f64)> {
        self.values
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect()
    }
}

/// Parse a `key=value` command-line override.
pub fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let number: f64 = value
        .parse()
        .map_err(|_| format!("value of `{key}` must be a number, got `{value}`"))?;
    Ok((key.to_string(), number))
}
