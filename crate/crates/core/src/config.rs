//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::Schema;
use crate::error::{Error, Result};
use crate::mlp::{Architecture, HyperParams};
use crate::value::BaselinePolicy;

/// Environment variable prepended to relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "HARSANYI_OUTPUT_ROOT";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub dataset: DatasetConfig,
    pub model: ModelConfig,
    pub training: HyperParams,
    pub analysis: AnalysisConfig,
    pub noise: NoiseConfig,
    pub synth: SynthConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// A file path, or `builtin:tictactoe` / `builtin:wifi-surrogate`.
    pub path: String,
    pub schema: Schema,
    pub split_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub architecture: Architecture,
    pub seed: u64,
    /// Seed of the independently trained model used for transferability.
    pub second_seed: u64,
    /// Architecture of the second model; the first model's when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_architecture: Option<Architecture>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Sub-category selector, see [`crate::data::subcategory_filter`].
    pub category: String,
    /// Salience ratio for sparsity, discrimination and multi-variable strength.
    pub ratio: f64,
    pub dictionary_ratio: f64,
    /// Second dictionary run at a lower threshold.
    pub vanilla_ratio: f64,
    pub k_grid: Vec<usize>,
    pub transfer_ratios: Vec<f64>,
    pub transfer_reference_ratio: f64,
    pub random_trials: usize,
    pub sampling_seed: u64,
    pub include_empty: bool,
    pub baseline: BaselinePolicy,
    pub histogram_bins: usize,
    /// Number of most frequent dictionary concepts given a histogram.
    pub histogram_concepts: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub seed: u64,
    pub max_n: usize,
    pub games_per_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub label_ratios: Vec<f64>,
    pub input_strengths: Vec<f64>,
    pub corruption_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            output_dir: PathBuf::from("out"),
            dataset: DatasetConfig::default(),
            model: ModelConfig::default(),
            training: HyperParams::default(),
            analysis: AnalysisConfig::default(),
            noise: NoiseConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            path: "builtin:wifi-surrogate".into(),
            schema: Schema::Wifi,
            split_seed: 7,
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            architecture: Architecture::Mlp5,
            seed: 1,
            second_seed: 2,
            second_architecture: None,
        }
    }
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            category: "category-4".into(),
            ratio: 0.05,
            dictionary_ratio: 0.1,
            vanilla_ratio: 0.05,
            k_grid: vec![1, 2, 5, 10, 20, 30, 50, 70, 100],
            transfer_ratios: vec![0.05, 0.10, 0.15, 0.20, 0.25, 0.30],
            transfer_reference_ratio: 0.05,
            random_trials: 10_000,
            sampling_seed: 11,
            include_empty: false,
            baseline: BaselinePolicy::default(),
            histogram_bins: 20,
            histogram_concepts: 5,
        }
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 17,
            max_n: 10,
            games_per_size: 5,
        }
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            label_ratios: vec![0.0, 0.15, 0.3],
            input_strengths: vec![0.0, 0.25, 0.5],
            corruption_seed: 5,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.analysis;
        let ratios = [a.ratio, a.dictionary_ratio, a.vanilla_ratio, a.transfer_reference_ratio];
        for r in ratios.iter().chain(&a.transfer_ratios) {
            if !(*r > 0.0 && *r < 1.0) {
                return Err(Error::Config(format!("salience ratio {r} outside (0, 1)")));
            }
        }
        if a.k_grid.is_empty() || a.k_grid.contains(&0) {
            return Err(Error::Config("k_grid needs positive sizes".into()));
        }
        for r in &self.noise.label_ratios {
            if !(0.0..=1.0).contains(r) {
                return Err(Error::Config(format!("label noise ratio {r} outside [0, 1]")));
            }
        }
        for d in &self.noise.input_strengths {
            if !(d.is_finite() && *d >= 0.0) {
                return Err(Error::Config(format!("input noise strength {d} must be non-negative")));
            }
        }
        if self.training.epochs == 0 || self.training.batch_size == 0 {
            return Err(Error::Config("epochs and batch_size must be positive".into()));
        }
        Ok(())
    }

    pub fn second_architecture(&self) -> Architecture {
        self.model.second_architecture.unwrap_or(self.model.architecture)
    }

    /// Output directory with [`OUTPUT_ROOT_ENV`] applied to relative paths.
    pub fn output_path(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_ENV) {
            Some(root) if self.output_dir.is_relative() => PathBuf::from(root).join(&self.output_dir),
            _ => self.output_dir.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = RunConfig::from_toml(
            "output_dir = \"runs/a\"\n[dataset]\npath = \"builtin:tictactoe\"\nschema = \"tictactoe\"\n[analysis]\ncategory = \"row1\"\n",
        )
        .unwrap();
        assert_eq!(c.dataset.schema, Schema::Tictactoe);
        assert_eq!(c.analysis.category, "row1");
        assert_eq!(c.analysis.k_grid, AnalysisConfig::default().k_grid);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_ratios() {
        assert!(matches!(RunConfig::from_toml("colour = 1\n"), Err(Error::Config(_))));
        assert!(RunConfig::from_toml("[analysis]\nratio = 1.5\n").is_err());
    }
}
