//! The optional TOML configuration file.
//!
//! ```toml
//! listen = "127.0.0.1:7200"
//! data_dir = "oekg-data"
//! read_only = false
//! registry = "registry.tsv"     # loaded at startup
//! prefixes = "prefixes.tsv"     # replaces the default prefix table
//! max_body_bytes = 268435456
//! ```
//!
//! Relative paths resolve against the file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_LISTEN: &str = "127.0.0.1:7200";
pub const DEFAULT_DATA_DIR: &str = "oekg-data";
pub const DEFAULT_MAX_BODY_BYTES: usize = 256 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub listen: Option<String>,
    pub data_dir: Option<PathBuf>,
    pub read_only: Option<bool>,
    pub registry: Option<PathBuf>,
    pub prefixes: Option<PathBuf>,
    pub max_body_bytes: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let mut config: Config =
            toml::from_str(&text).map_err(|source| ConfigError::Toml { path: path.into(), source })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut config.data_dir, &mut config.registry, &mut config.prefixes].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}
