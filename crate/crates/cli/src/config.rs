use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ramanujan_core::foliation::FlowOptions;
use ramanujan_core::numeric::FloatMode;
use ramanujan_core::verify::VerifyConfig;
use serde::{Deserialize, Serialize};

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "RAMANUJAN_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Truncation order for numeric q-expansion evaluation.
    pub order: i64,
    pub float_mode: FloatMode,
    pub format: Format,
    pub verify: VerifyConfig,
    pub flow: FlowOptions,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            order: 80,
            float_mode: FloatMode::Double,
            format: Format::Text,
            verify: VerifyConfig::default(),
            flow: FlowOptions::default(),
        }
    }
}

impl Config {
    /// Reads `explicit`, else the file named by [`CONFIG_ENV`], else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Config> {
        let path: Option<PathBuf> = match explicit {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        };
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
