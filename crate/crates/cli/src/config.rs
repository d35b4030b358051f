use std::path::Path;

use serde::Deserialize;
use symrec::classifier::TrainConfig;
use symrec::datagen::{LibraryConfig, NoiseConfig};

use crate::CliError;

/// Settings file shared by all subcommands. Command-line flags win over it.
///
/// ```toml
/// queries_per_class = 10
///
/// [train]
/// engine = "ga"
/// score = "bic"
/// seed = 7
///
/// [train.arg]
/// tolerance = 0.01
/// ```
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub library: LibraryConfig,
    pub degrade: NoiseConfig,
    pub queries_per_class: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            train: TrainConfig::default(),
            library: LibraryConfig::default(),
            degrade: NoiseConfig::default(),
            queries_per_class: 10,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        cfg.train.validate().map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        cfg.degrade.validate().map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Ok(cfg)
    }
}
