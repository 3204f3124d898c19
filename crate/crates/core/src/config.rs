//! Engine configuration, loadable from a TOML key-value file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dimensions::{DimensionDescriptor, DimensionKind, LeniencyWeights};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct EngineConfig {
    pub pop_size: usize,
    pub cell_capacity: usize,
    pub publish_gen: u64,
    pub parents_per_population: usize,
    pub tournament_size: usize,
    pub mutation_rate: f64,
    pub rng_seed: u64,
    pub dims: Vec<DimensionKind>,
    pub granularity: usize,
    pub leniency_weights: LeniencyWeights,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            pop_size: 1000,
            cell_capacity: 25,
            publish_gen: 100,
            parents_per_population: 5,
            tournament_size: 3,
            mutation_rate: 0.30,
            rng_seed: 0,
            dims: vec![DimensionKind::Nsp, DimensionKind::Symmetry],
            granularity: 5,
            leniency_weights: LeniencyWeights::default(),
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let counts = [
            ("popSize", self.pop_size),
            ("cellCapacity", self.cell_capacity),
            ("publishGen", self.publish_gen as usize),
            ("parentsPerPopulation", self.parents_per_population),
            ("tournamentSize", self.tournament_size),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(ConfigError::Invalid(format!("{name} must be at least 1")));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(ConfigError::Invalid(
                "mutationRate must be in [0, 1]".into(),
            ));
        }
        validate_dims(&self.descriptors()).map_err(ConfigError::Invalid)?;
        let w = self.leniency_weights;
        LeniencyWeights::new(w.w0, w.w1, w.w2).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn descriptors(&self) -> Vec<DimensionDescriptor> {
        self.dims
            .iter()
            .map(|&kind| DimensionDescriptor {
                kind,
                granularity: self.granularity,
            })
            .collect()
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: EngineConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }
}

/// Archive axes: 2 to 7 distinct kinds, each granularity at least 2.
pub fn validate_dims(dims: &[DimensionDescriptor]) -> Result<(), String> {
    if !(2..=7).contains(&dims.len()) {
        return Err(format!(
            "archive needs 2 to 7 dimensions, got {}",
            dims.len()
        ));
    }
    for (i, d) in dims.iter().enumerate() {
        if d.granularity < 2 {
            return Err(format!("granularity of {} must be at least 2", d.kind));
        }
        if dims[..i].iter().any(|o| o.kind == d.kind) {
            return Err(format!("dimension {} listed twice", d.kind));
        }
    }
    Ok(())
}
