//! End-to-end orchestration: data loading, provider-stratified splitting,
//! training, evaluation and artifact output.

mod config;
mod eda;
mod run;
mod split;

use std::path::PathBuf;

use thiserror::Error;

use crate::autoencoder::AutoencoderError;
use crate::dimensionality::PcaError;
use crate::features::FeatureError;
use crate::ingest::IngestError;
use crate::metrics::MetricsError;
use crate::supervised::ModelError;
use crate::synth::SynthError;

pub use config::{
    AutoencoderParams, DataConfig, ModelKind, PcaParams, PipelineConfig, SplitConfig,
};
pub use eda::{
    eda_report, volume_outliers, EdaReport, FraudProportions, Proportions, VolumeOutlier,
    VolumeOutliers,
};
pub use run::{
    cmd_eda, cmd_evaluate, cmd_sweep, cmd_synth, cmd_train, evaluate_model, load_data, prepare,
    run_pipeline, score, train_model, ModelDocument, Prepared, RunReport, TrainedModel, EDA_FILE,
    JOIN_REPORT_FILE, MODEL_FILE, MODEL_FORMAT_VERSION, REPORT_FILE, ROC_FILE, SWEEP_FILE,
};
pub use split::{split, SplitSummary};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("need at least 2 fraud and 2 non-fraud providers, found {fraud} and {clean}")]
    TooFewProviders { fraud: usize, clean: usize },
    #[error("model file does not match the data: {0}")]
    ModelMismatch(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Autoencoder(#[from] AutoencoderError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl PipelineError {
    /// 2 = configuration, 3 = data, 4 = numeric failure.
    pub fn exit_code(&self) -> i32 {
        use PipelineError::*;
        match self {
            Config(_) => EXIT_CONFIG,
            TooFewProviders { .. } | ModelMismatch(_) | Ingest(_) | Io { .. } | Json { .. } => {
                EXIT_DATA
            }
            Synth(SynthError::InvalidConfig(_)) => EXIT_CONFIG,
            Synth(_) => EXIT_DATA,
            Feature(FeatureError::NonFinite { .. }) => EXIT_NUMERIC,
            Feature(FeatureError::InvalidArgument(_) | FeatureError::NonMonotoneBands(_)) => {
                EXIT_CONFIG
            }
            Feature(_) => EXIT_DATA,
            Model(ModelError::InvalidHyperparameter(_)) => EXIT_CONFIG,
            Model(ModelError::EmptyMatrix) => EXIT_DATA,
            Model(_) => EXIT_NUMERIC,
            Pca(PcaError::KTooLarge { .. } | PcaError::ZeroComponents) => EXIT_CONFIG,
            Pca(PcaError::TooFewRows) => EXIT_DATA,
            Pca(_) => EXIT_NUMERIC,
            Autoencoder(
                AutoencoderError::InvalidConfig(_) | AutoencoderError::PercentileOutOfRange(_),
            ) => EXIT_CONFIG,
            Autoencoder(AutoencoderError::EmptyErrors | AutoencoderError::EmptyInput) => EXIT_DATA,
            Autoencoder(_) => EXIT_NUMERIC,
            Metrics(MetricsError::SingleClass) => EXIT_DATA,
            Metrics(_) => EXIT_NUMERIC,
        }
    }
}
