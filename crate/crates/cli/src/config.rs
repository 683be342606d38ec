use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tractlab::{AcousticConstants, FrequencyGrid, ModelKind, ModelSetup, TractError};

/// Exit codes: 2 usage, 3 input data or I/O, 4 numeric failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<TractError> for CliError {
    fn from(e: TractError) -> Self {
        match e {
            TractError::ExtractionFailure { .. } | TractError::DegenerateHull(_) => CliError::Numeric(e.to_string()),
            TractError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            TractError::InvalidInput(_) | TractError::InvalidParams(_) | TractError::Parse { .. } => {
                CliError::Input(e.to_string())
            }
        }
    }
}

/// Contents of the `--config` document; every field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub setup: ModelSetup,
    pub grid: FrequencyGrid,
    /// Overrides the per-model loss setting when present.
    pub constants: Option<AcousticConstants>,
    pub theta_grid_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            setup: ModelSetup::default(),
            grid: FrequencyGrid::default(),
            constants: None,
            theta_grid_size: 96,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg: Self = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
            }
        };
        cfg.setup.validate()?;
        cfg.grid.validate()?;
        if let Some(c) = &cfg.constants {
            c.validate()?;
        }
        Ok(cfg)
    }

    pub fn constants(&self, model: ModelKind) -> AcousticConstants {
        self.constants.unwrap_or_else(|| self.setup.default_constants(model))
    }
}

/// Written next to every output set.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: serde_json::Value,
    pub config: RunConfig,
    pub tool_version: &'static str,
    pub rng_seed: u64,
    pub outputs: Vec<PathBuf>,
    pub duration_s: f64,
}
