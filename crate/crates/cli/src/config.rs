use std::path::{Path, PathBuf};

use lv4::lvmap::DEFAULT_EXTINCTION_THRESHOLD;
use lv4::stability::DEFAULT_RESOLUTION;
use lv4::{get_preset, EcoParams, StateVec};
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_GENERATIONS: usize = 1000;

/// On-disk run description. Every field is optional; command-line flags
/// override whatever the file sets.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub params: Option<EcoParams>,
    pub init: Option<StateVec>,
    pub generations: Option<usize>,
    pub extinction_threshold: Option<f64>,
    pub resolution: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Default)]
pub struct Overrides {
    pub preset: Option<String>,
    pub generations: Option<usize>,
    pub resolution: Option<usize>,
    pub out: Option<PathBuf>,
}

/// Fully resolved and validated run.
#[derive(Debug, Clone)]
pub struct Run {
    pub preset: Option<String>,
    pub eco: EcoParams,
    pub init: Option<StateVec>,
    pub generations: usize,
    pub extinction_threshold: f64,
    pub resolution: usize,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config: {e}")))
    }

    pub fn resolve(self, flags: Overrides) -> Result<Run, CliError> {
        let preset_name = flags.preset.or(self.preset);
        let (eco, preset_init) = match (&preset_name, self.params) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "preset and params are mutually exclusive".into(),
                ))
            }
            (Some(name), None) => {
                let p = get_preset(name).map_err(|e| CliError::Config(e.to_string()))?;
                (p.eco.clone(), p.init)
            }
            (None, Some(eco)) => (eco, None),
            (None, None) => {
                return Err(CliError::Config(
                    "either preset or params is required".into(),
                ))
            }
        };
        eco.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let extinction_threshold = self
            .extinction_threshold
            .unwrap_or(DEFAULT_EXTINCTION_THRESHOLD);
        if !(extinction_threshold.is_finite() && extinction_threshold >= 0.0) {
            return Err(CliError::Config(format!(
                "extinction_threshold must be finite and >= 0, got {extinction_threshold}"
            )));
        }
        let resolution = flags
            .resolution
            .or(self.resolution)
            .unwrap_or(DEFAULT_RESOLUTION);
        if resolution < 2 {
            return Err(CliError::Config(format!(
                "resolution must be at least 2, got {resolution}"
            )));
        }
        Ok(Run {
            preset: preset_name,
            eco,
            init: self.init.or(preset_init),
            generations: flags
                .generations
                .or(self.generations)
                .unwrap_or(DEFAULT_GENERATIONS),
            extinction_threshold,
            resolution,
            out: flags.out.or(self.out).unwrap_or_else(|| PathBuf::from(".")),
        })
    }
}
