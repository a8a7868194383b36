use std::path::Path;

use fraisse_core::builder::TaskOrder;
use fraisse_core::variety::VarietyTag;
use serde::Deserialize;

/// Environment variable naming a TOML file with default flag values.
pub const CONFIG_ENV: &str = "FRAISSE_CONFIG";

/// Defaults read from the config file; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub variety: Option<VarietyTag>,
    pub k: Option<usize>,
    pub budget: Option<usize>,
    pub stage_cap: Option<usize>,
    pub order: Option<TaskOrder>,
    pub horizon: Option<usize>,
    pub rounds: Option<usize>,
    pub max_depth: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// The file named by [`CONFIG_ENV`], or the empty config when unset.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Config::load(Path::new(&p)),
            _ => Ok(Config::default()),
        }
    }
}
