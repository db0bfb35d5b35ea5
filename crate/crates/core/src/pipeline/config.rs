use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::autoencoder::{Activation, NetworkConfig};
use crate::features::{AnalysisUnit, FeatureOptions};
use crate::ingest::{Schema, SourceFiles};
use crate::supervised::{ForestParams, LogisticParams};
use crate::synth::SynthConfig;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Logreg,
    Forest,
    PcaRecon,
    #[default]
    Autoencoder,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::Forest => "forest",
            ModelKind::PcaRecon => "pca-recon",
            ModelKind::Autoencoder => "autoencoder",
        }
    }

    /// Reconstruction models score by error and calibrate by percentile.
    pub fn is_reconstruction(self) -> bool {
        matches!(self, ModelKind::PcaRecon | ModelKind::Autoencoder)
    }
}

impl std::str::FromStr for ModelKind {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logreg" => Ok(ModelKind::Logreg),
            "forest" => Ok(ModelKind::Forest),
            "pca-recon" => Ok(ModelKind::PcaRecon),
            "autoencoder" => Ok(ModelKind::Autoencoder),
            other => Err(PipelineError::Config(format!("unknown model {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            test_fraction: 0.3,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcaParams {
    /// Retained components; `None` means ⌈d/4⌉.
    pub components: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoencoderParams {
    /// Sizes between input and output; `None` means [⌈d/2⌉, ⌈d/4⌉, ⌈d/2⌉].
    pub hidden_sizes: Option<Vec<usize>>,
    pub dropout_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub seed: u64,
    pub hidden_activation: Activation,
}

impl Default for AutoencoderParams {
    fn default() -> Self {
        let n = NetworkConfig::for_features(1);
        AutoencoderParams {
            hidden_sizes: None,
            dropout_rate: n.dropout_rate,
            epochs: n.epochs,
            batch_size: n.batch_size,
            learning_rate: n.learning_rate,
            momentum: n.momentum,
            seed: n.seed,
            hidden_activation: n.hidden_activation,
        }
    }
}

impl AutoencoderParams {
    pub fn network(&self, d: usize) -> NetworkConfig {
        let mut net = NetworkConfig::for_features(d);
        if let Some(hidden) = &self.hidden_sizes {
            net.layer_sizes = std::iter::once(d)
                .chain(hidden.iter().copied())
                .chain([d])
                .collect();
        }
        net.dropout_rate = self.dropout_rate;
        net.epochs = self.epochs;
        net.batch_size = self.batch_size;
        net.learning_rate = self.learning_rate;
        net.momentum = self.momentum;
        net.seed = self.seed;
        net.hidden_activation = self.hidden_activation;
        net
    }
}

/// Where the claims come from. Exactly one of the two should be set; with
/// neither, a default synthetic corpus is generated.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub files: Option<SourceFiles>,
    pub synth: Option<SynthConfig>,
    pub schema: Schema,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub data: DataConfig,
    pub unit: AnalysisUnit,
    pub split: SplitConfig,
    pub model: ModelKind,
    pub logistic: LogisticParams,
    pub forest: ForestParams,
    pub pca: PcaParams,
    pub autoencoder: AutoencoderParams,
    /// Probability cut-off for supervised models (fraud iff score ≥ threshold).
    pub threshold: f64,
    /// Calibration percentile for reconstruction models.
    pub percentile: f64,
    pub sweep_percentiles: Vec<f64>,
    pub sweep_thresholds: Vec<f64>,
    pub reference_date: NaiveDate,
    pub age_bands: Vec<u32>,
    pub top_k: usize,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            data: DataConfig::default(),
            unit: AnalysisUnit::Claim,
            split: SplitConfig::default(),
            model: ModelKind::default(),
            logistic: LogisticParams::default(),
            forest: ForestParams::default(),
            pca: PcaParams::default(),
            autoencoder: AutoencoderParams::default(),
            threshold: 0.5,
            percentile: 95.0,
            sweep_percentiles: vec![0.0, 50.0, 75.0, 80.0, 85.0, 90.0, 95.0, 97.5, 99.0, 100.0],
            sweep_thresholds: (0..=20).map(|i| f64::from(i) * 0.05).collect(),
            reference_date: FeatureOptions::default().reference_date,
            age_bands: vec![0, 30, 70],
            top_k: 10,
            out: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }

    /// Applies a single seed to the split and every model.
    pub fn set_seed(&mut self, seed: u64) {
        self.split.seed = seed;
        self.forest.seed = seed;
        self.autoencoder.seed = seed;
        if let Some(s) = &mut self.data.synth {
            s.seed = seed;
        }
    }

    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions {
            reference_date: self.reference_date,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if !(self.split.test_fraction > 0.0 && self.split.test_fraction < 1.0) {
            return bad(format!(
                "test_fraction {} outside (0, 1)",
                self.split.test_fraction
            ));
        }
        if self.data.files.is_some() && self.data.synth.is_some() {
            return bad("data.files and data.synth are mutually exclusive".into());
        }
        if !self.threshold.is_finite() {
            return bad(format!("threshold {} is not finite", self.threshold));
        }
        if !(self.percentile > 0.0 && self.percentile <= 100.0) {
            return bad(format!("percentile {} outside (0, 100]", self.percentile));
        }
        if let Some(p) = self
            .sweep_percentiles
            .iter()
            .find(|p| !(0.0..=100.0).contains(*p))
        {
            return bad(format!("sweep percentile {p} outside [0, 100]"));
        }
        if let Some(t) = self.sweep_thresholds.iter().find(|t| !t.is_finite()) {
            return bad(format!("sweep threshold {t} is not finite"));
        }
        if self.top_k == 0 {
            return bad("top_k must be positive".into());
        }
        if let Some(s) = &self.data.synth {
            s.validate()
                .map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        Ok(())
    }
}
