use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parsing {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("environment variable {name}: {msg}")]
    Env { name: String, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub listen_addr: String,
    pub data_dir: PathBuf,
    pub alphabet_cap: usize,
    pub job_workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen_addr: "127.0.0.1:8080".into(),
            data_dir: PathBuf::from("workbench-data"),
            alphabet_cap: relim_core::DEFAULT_ALPHABET_CAP,
            job_workers: 2,
        }
    }
}

pub const ENV_PREFIX: &str = "WORKBENCH_";

impl Config {
    /// Reads a TOML or JSON file (chosen by extension), then applies
    /// `WORKBENCH_*` overrides from the process environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Config::default(),
        };
        cfg.apply_env(std::env::vars())?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let parse_err = |msg: String| ConfigError::Parse { path: path.into(), msg };
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
        }
    }

    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), ConfigError> {
        for (name, value) in vars {
            let Some(key) = name.strip_prefix(ENV_PREFIX) else { continue };
            let number = |v: &str| -> Result<usize, ConfigError> {
                v.parse().map_err(|_| ConfigError::Env { name: name.clone(), msg: format!("{v:?} is not a number") })
            };
            match key {
                "LISTEN_ADDR" => self.listen_addr = value,
                "DATA_DIR" => self.data_dir = PathBuf::from(value),
                "ALPHABET_CAP" => self.alphabet_cap = number(&value)?,
                "JOB_WORKERS" => self.job_workers = number(&value)?.max(1),
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides() {
        let mut c = Config::default();
        c.apply_env([
            ("WORKBENCH_ALPHABET_CAP".to_string(), "12".to_string()),
            ("WORKBENCH_LISTEN_ADDR".to_string(), "0.0.0.0:9000".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ])
        .unwrap();
        assert_eq!((c.alphabet_cap, c.listen_addr.as_str()), (12, "0.0.0.0:9000"));
        assert!(c.apply_env([("WORKBENCH_JOB_WORKERS".to_string(), "many".to_string())]).is_err());
    }

    #[test]
    fn toml_and_json_files() {
        let dir = std::env::temp_dir().join(format!("wb-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let t = dir.join("c.toml");
        std::fs::write(&t, "listen_addr = \"127.0.0.1:1\"\njob_workers = 3\n").unwrap();
        let c = Config::from_file(&t).unwrap();
        assert_eq!((c.listen_addr.as_str(), c.job_workers, c.alphabet_cap), ("127.0.0.1:1", 3, 16));
        let j = dir.join("c.json");
        std::fs::write(&j, r#"{"data_dir": "/tmp/x"}"#).unwrap();
        assert_eq!(Config::from_file(&j).unwrap().data_dir, PathBuf::from("/tmp/x"));
        std::fs::remove_dir_all(dir).ok();
    }
}
