use std::path::Path;

use serde::Deserialize;
use stland::pipeline::{EpsilonSpec, PipelineConfig};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum EpsilonValue {
    Text(String),
    List(Vec<f64>),
}

/// Pipeline settings read from a TOML file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    windows: Option<usize>,
    points_per_window: Option<usize>,
    embed_dim: Option<usize>,
    delay: Option<usize>,
    epsilons: Option<EpsilonValue>,
    hom_dim: Option<usize>,
    k_max: Option<usize>,
    seed: Option<u64>,
}

/// Command-line overrides; `None` leaves the file or default value in place.
#[derive(Debug, Default)]
pub struct Overrides {
    pub windows: Option<usize>,
    pub points_per_window: Option<usize>,
    pub embed_dim: Option<usize>,
    pub delay: Option<usize>,
    pub epsilons: Option<String>,
    pub hom_dim: Option<usize>,
    pub k_max: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config file: {e}")))
    }

    fn epsilons(&self) -> CliResult<Option<EpsilonSpec>> {
        match &self.epsilons {
            None => Ok(None),
            Some(EpsilonValue::Text(s)) => Ok(Some(s.parse()?)),
            Some(EpsilonValue::List(v)) => {
                let joined: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                Ok(Some(joined.join(",").parse()?))
            }
        }
    }
}

/// Defaults, then the file, then flags.
pub fn resolve(file: &ConfigFile, flags: &Overrides) -> CliResult<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let layers = [
        (file.windows, flags.windows, &mut cfg.windows),
        (file.points_per_window, flags.points_per_window, &mut cfg.points_per_window),
        (file.embed_dim, flags.embed_dim, &mut cfg.embed_dim),
        (file.delay, flags.delay, &mut cfg.delay),
        (file.hom_dim, flags.hom_dim, &mut cfg.hom_dim),
        (file.k_max, flags.k_max, &mut cfg.k_max),
    ];
    for (from_file, from_flag, slot) in layers {
        if let Some(v) = from_flag.or(from_file) {
            *slot = v;
        }
    }
    if let Some(s) = flags.seed.or(file.seed) {
        cfg.seed = s;
    }
    if let Some(e) = &flags.epsilons {
        cfg.epsilons = e.parse()?;
    } else if let Some(e) = file.epsilons()? {
        cfg.epsilons = e;
    }
    cfg.validate()?;
    Ok(cfg)
}
