//! Flat `key = value` experiment configs.
//!
//! `#` starts a comment. Paths are resolved relative to the config file's
//! directory, so a config and its assets travel together.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::CliError;

pub struct Config {
    map: BTreeMap<String, String>,
    dir: PathBuf,
}

impl Config {
    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read `{path}`: {e}")))?;
        let dir = Path::new(path)
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{path}:{}: expected `key = value`, got `{line}`",
                    idx + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let cfg = Self { map, dir };
        // Every run must be reproducible from the config alone.
        cfg.u64("seed")?;
        Ok(cfg)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key)
            .ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.require(key)?
            .parse()
            .map_err(|e| CliError::Config(format!("bad `{key}`: {e}")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            Some(_) => self.f64(key),
            None => Ok(default),
        }
    }

    pub fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.require(key)?
            .parse()
            .map_err(|e| CliError::Config(format!("bad `{key}`: {e}")))
    }

    pub fn list_f64(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.list(key, |item| item.parse::<f64>().map_err(|e| e.to_string()))
    }

    pub fn list_u64(&self, key: &str) -> Result<Vec<u64>, CliError> {
        self.list(key, |item| item.parse::<u64>().map_err(|e| e.to_string()))
    }

    pub fn list_str(&self, key: &str) -> Result<Vec<String>, CliError> {
        self.list(key, |item| Ok::<_, String>(item.to_string()))
    }

    fn list<T, E: std::fmt::Display>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Vec<T>, CliError> {
        let raw = self.require(key)?;
        let items: Vec<&str> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect();
        if items.is_empty() {
            return Err(CliError::Config(format!("grid `{key}` is empty")));
        }
        items
            .into_iter()
            .map(|item| {
                parse(item)
                    .map_err(|e| CliError::Config(format!("bad `{key}` entry `{item}`: {e}")))
            })
            .collect()
    }

    /// Resolves a config value as a path relative to the config directory.
    pub fn path(&self, key: &str) -> Result<PathBuf, CliError> {
        Ok(self.resolve(self.require(key)?))
    }

    pub fn path_opt(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(|v| self.resolve(v))
    }

    /// Resolves an arbitrary string (e.g. a list entry) as a path relative
    /// to the config directory.
    pub fn resolve(&self, value: &str) -> PathBuf {
        let p = Path::new(value);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }
}
