use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::split::{split, SplitSummary};
use super::{eda_report, ModelKind, PipelineConfig, PipelineError, SplitConfig};
use crate::autoencoder::{
    nearest_rank, percentile_sweep, reconstruction_errors, train_autoencoder, AutoencoderModel,
};
use crate::dimensionality::{fit_pca, PcaProjection};
use crate::features::{raw_features, AnalysisUnit, FeatureMatrix, Standardization};
use crate::ingest::{load_dataset, MergedDataset};
use crate::metrics::{
    evaluate, threshold_sweep, write_roc_csv, write_sweep_csv, DecisionRule, EvaluationReport,
};
use crate::supervised::{
    predict_proba_forest, predict_proba_logistic, train_forest, train_logistic, ForestModel,
    LogisticModel,
};
use crate::synth::generate;

pub const MODEL_FORMAT_VERSION: u32 = 1;

pub const MODEL_FILE: &str = "model.json";
pub const REPORT_FILE: &str = "report.json";
pub const ROC_FILE: &str = "roc.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const EDA_FILE: &str = "eda.json";
pub const JOIN_REPORT_FILE: &str = "join_report.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrainedModel {
    Logreg(LogisticModel),
    Forest(ForestModel),
    PcaRecon(PcaProjection),
    Autoencoder(AutoencoderModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            TrainedModel::Logreg(_) => ModelKind::Logreg,
            TrainedModel::Forest(_) => ModelKind::Forest,
            TrainedModel::PcaRecon(_) => ModelKind::PcaRecon,
            TrainedModel::Autoencoder(_) => ModelKind::Autoencoder,
        }
    }

    fn final_loss(&self) -> Option<f64> {
        match self {
            TrainedModel::Logreg(m) => m.training_log.last().copied(),
            TrainedModel::Autoencoder(m) => m.training_loss_curve.last().copied(),
            _ => None,
        }
    }
}

/// Everything needed to score new rows: the model, the feature layout it was
/// trained on and the standardization fitted on the training split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub unit: AnalysisUnit,
    pub feature_columns: Vec<String>,
    pub standardization: Standardization,
    pub threshold: f64,
    pub rule: DecisionRule,
    pub percentile: Option<f64>,
    pub split: SplitConfig,
    pub training_rows: usize,
    pub warnings: Vec<String>,
    pub model: TrainedModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: ModelKind,
    pub unit: AnalysisUnit,
    pub split: SplitSummary,
    pub n_features: usize,
    pub training_rows: usize,
    pub percentile: Option<f64>,
    pub final_training_loss: Option<f64>,
    pub warnings: Vec<String>,
    pub evaluation: EvaluationReport,
}

/// Both sides of the split before standardization.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub dataset: MergedDataset,
    pub split: SplitSummary,
    pub train_raw: FeatureMatrix,
    pub test_raw: FeatureMatrix,
}

impl Prepared {
    pub fn train(&self, scale: &Standardization) -> Result<FeatureMatrix, PipelineError> {
        scaled(&self.train_raw, scale)
    }

    pub fn test(&self, scale: &Standardization) -> Result<FeatureMatrix, PipelineError> {
        scaled(&self.test_raw, scale)
    }

    pub fn fitted_scale(&self) -> Standardization {
        Standardization::fit(&self.train_raw.values)
    }
}

fn scaled(raw: &FeatureMatrix, scale: &Standardization) -> Result<FeatureMatrix, PipelineError> {
    let mut m = raw.clone();
    m.apply_standardization(scale)?;
    Ok(m)
}

pub fn load_data(cfg: &PipelineConfig) -> Result<MergedDataset, PipelineError> {
    match &cfg.data.files {
        Some(files) => Ok(load_dataset(files, &cfg.data.schema)?),
        None => {
            let synth = cfg.data.synth.clone().unwrap_or_default();
            Ok(generate(&synth)?.to_dataset()?)
        }
    }
}

/// Splits by provider and builds raw features separately on each side, so
/// provider aggregates never mix train and test claims.
pub fn prepare(cfg: &PipelineConfig, dataset: MergedDataset) -> Result<Prepared, PipelineError> {
    let (train, test, summary) = split(&dataset, cfg.split.test_fraction, cfg.split.seed)?;
    let opts = cfg.feature_options();
    Ok(Prepared {
        train_raw: raw_features(&train, cfg.unit, &opts)?,
        test_raw: raw_features(&test, cfg.unit, &opts)?,
        split: summary,
        dataset,
    })
}

pub fn score(model: &TrainedModel, features: &FeatureMatrix) -> Result<Vec<f64>, PipelineError> {
    Ok(match model {
        TrainedModel::Logreg(m) => predict_proba_logistic(m, features)?,
        TrainedModel::Forest(m) => predict_proba_forest(m, features)?,
        TrainedModel::PcaRecon(p) => p.reconstruction_errors(&features.values)?,
        TrainedModel::Autoencoder(m) => reconstruction_errors(m, features)?.total_error,
    })
}

/// Nearest-rank percentile of the training split's non-fraud scores.
fn calibrate(
    model: &TrainedModel,
    train: &FeatureMatrix,
    percentile: f64,
) -> Result<f64, PipelineError> {
    Ok(nearest_rank(
        &score(model, &train.non_fraud())?,
        percentile,
    )?)
}

pub fn train_model(
    cfg: &PipelineConfig,
    prepared: &Prepared,
) -> Result<ModelDocument, PipelineError> {
    let scale = prepared.fitted_scale();
    let train = prepared.train(&scale)?;
    let d = train.n_cols();
    let mut warnings = Vec::new();
    let (model, training_rows) = match cfg.model {
        ModelKind::Logreg => (
            TrainedModel::Logreg(train_logistic(&train, &cfg.logistic)?),
            train.n_rows(),
        ),
        ModelKind::Forest => (
            TrainedModel::Forest(train_forest(&train, &cfg.forest)?),
            train.n_rows(),
        ),
        ModelKind::PcaRecon => {
            let clean = train.non_fraud();
            let k = cfg.pca.components.unwrap_or(d.div_ceil(4).max(1));
            let p = fit_pca(&clean, k)?;
            let flagged = p.rank_deficient.iter().filter(|&&f| f).count();
            if flagged > 0 {
                warnings.push(format!(
                    "{flagged} of {k} principal components are beyond the numerical rank"
                ));
            }
            (TrainedModel::PcaRecon(p), clean.n_rows())
        }
        ModelKind::Autoencoder => {
            let clean = train.non_fraud();
            let m = train_autoencoder(&clean, &cfg.autoencoder.network(d))?;
            if let (Some(first), Some(last)) =
                (m.training_loss_curve.first(), m.training_loss_curve.last())
            {
                if last >= first {
                    warnings.push(format!(
                        "training loss did not decrease ({first} -> {last})"
                    ));
                }
            }
            (TrainedModel::Autoencoder(m), clean.n_rows())
        }
    };
    let (threshold, rule, percentile) = if cfg.model.is_reconstruction() {
        (
            calibrate(&model, &train, cfg.percentile)?,
            DecisionRule::Above,
            Some(cfg.percentile),
        )
    } else {
        (cfg.threshold, DecisionRule::AtLeast, None)
    };
    let mut model = model;
    if let TrainedModel::Autoencoder(m) = &mut model {
        m.threshold = Some(threshold);
    }
    Ok(ModelDocument {
        format_version: MODEL_FORMAT_VERSION,
        unit: cfg.unit,
        feature_columns: train.column_names.clone(),
        standardization: scale,
        threshold,
        rule,
        percentile,
        split: cfg.split.clone(),
        training_rows,
        warnings,
        model,
    })
}

fn check_compatible(doc: &ModelDocument, prepared: &Prepared) -> Result<(), PipelineError> {
    if doc.format_version != MODEL_FORMAT_VERSION {
        return Err(PipelineError::ModelMismatch(format!(
            "format version {} (expected {MODEL_FORMAT_VERSION})",
            doc.format_version
        )));
    }
    if doc.unit != prepared.test_raw.unit {
        return Err(PipelineError::ModelMismatch(format!(
            "model trained at {:?} level, data prepared at {:?} level",
            doc.unit, prepared.test_raw.unit
        )));
    }
    if doc.feature_columns != prepared.test_raw.column_names
        || doc.standardization.len() != doc.feature_columns.len()
    {
        return Err(PipelineError::ModelMismatch(
            "feature columns differ".into(),
        ));
    }
    Ok(())
}

/// Scores the test split. The operating threshold comes from the config: a
/// fixed probability cut-off for supervised models, a percentile of the
/// training split's non-fraud scores for reconstruction models.
pub fn evaluate_model(
    cfg: &PipelineConfig,
    doc: &ModelDocument,
    prepared: &Prepared,
) -> Result<RunReport, PipelineError> {
    check_compatible(doc, prepared)?;
    let test = prepared.test(&doc.standardization)?;
    let kind = doc.model.kind();
    let (threshold, percentile) = if kind.is_reconstruction() {
        let train = prepared.train(&doc.standardization)?;
        (
            calibrate(&doc.model, &train, cfg.percentile)?,
            Some(cfg.percentile),
        )
    } else {
        (cfg.threshold, None)
    };
    let scores = score(&doc.model, &test)?;
    let mut evaluation = evaluate(&scores, &test.target, threshold, doc.rule)?;
    let sweep = if kind.is_reconstruction() {
        percentile_sweep(&scores, &test.target, &cfg.sweep_percentiles)?
    } else {
        threshold_sweep(&scores, &test.target, &cfg.sweep_thresholds, doc.rule)?
    };
    evaluation.threshold_table = Some(sweep);
    Ok(RunReport {
        model: kind,
        unit: doc.unit,
        split: prepared.split.clone(),
        n_features: doc.feature_columns.len(),
        training_rows: doc.training_rows,
        percentile,
        final_training_loss: doc.model.final_loss(),
        warnings: doc.warnings.clone(),
        evaluation,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), PipelineError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(io_err(&path))?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, PipelineError> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| PipelineError::Json {
        path: path.clone(),
        source,
    })?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(io_err(&path))?;
    Ok(path)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, PipelineError> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| PipelineError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn write_roc(dir: &Path, report: &RunReport) -> Result<PathBuf, PipelineError> {
    let (path, w) = create(dir, ROC_FILE)?;
    write_roc_csv(w, &report.evaluation.roc_points).map_err(io_err(&path))?;
    Ok(path)
}

fn write_sweep(dir: &Path, report: &RunReport) -> Result<PathBuf, PipelineError> {
    let (path, w) = create(dir, SWEEP_FILE)?;
    let rows = report
        .evaluation
        .threshold_table
        .as_deref()
        .unwrap_or_default();
    write_sweep_csv(w, rows).map_err(io_err(&path))?;
    Ok(path)
}

/// Writes the four synthetic input tables into the output directory.
pub fn cmd_synth(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let synth = cfg.data.synth.clone().unwrap_or_default();
    synth.validate()?;
    let files = generate(&synth)?.write_csv(&cfg.out)?;
    Ok(vec![
        files.beneficiaries,
        files.inpatient,
        files.outpatient,
        files.labels,
    ])
}

pub fn cmd_eda(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    cfg.validate()?;
    let dataset = load_data(cfg)?;
    let eda = eda_report(&dataset, cfg)?;
    Ok(vec![
        write_json(&cfg.out, EDA_FILE, &eda)?,
        write_json(&cfg.out, JOIN_REPORT_FILE, &dataset.join_report)?,
    ])
}

pub fn cmd_train(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    cfg.validate()?;
    let prepared = prepare(cfg, load_data(cfg)?)?;
    let doc = train_model(cfg, &prepared)?;
    Ok(vec![write_json(&cfg.out, MODEL_FILE, &doc)?])
}

fn evaluate_saved(cfg: &PipelineConfig) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    let doc: ModelDocument = read_json(&cfg.out.join(MODEL_FILE))?;
    let prepared = prepare(cfg, load_data(cfg)?)?;
    evaluate_model(cfg, &doc, &prepared)
}

/// Evaluates `model.json` from the output directory on the test split.
pub fn cmd_evaluate(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let report = evaluate_saved(cfg)?;
    Ok(vec![
        write_json(&cfg.out, REPORT_FILE, &report)?,
        write_roc(&cfg.out, &report)?,
    ])
}

pub fn cmd_sweep(cfg: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let report = evaluate_saved(cfg)?;
    Ok(vec![write_sweep(&cfg.out, &report)?])
}

/// The whole recipe; writes every artifact.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(RunReport, Vec<PathBuf>), PipelineError> {
    cfg.validate()?;
    let dataset = load_data(cfg)?;
    let eda = eda_report(&dataset, cfg)?;
    let join_report = dataset.join_report;
    let prepared = prepare(cfg, dataset)?;
    let doc = train_model(cfg, &prepared)?;
    let report = evaluate_model(cfg, &doc, &prepared)?;
    let out = &cfg.out;
    let written = vec![
        write_json(out, MODEL_FILE, &doc)?,
        write_json(out, REPORT_FILE, &report)?,
        write_roc(out, &report)?,
        write_sweep(out, &report)?,
        write_json(out, EDA_FILE, &eda)?,
        write_json(out, JOIN_REPORT_FILE, &join_report)?,
    ];
    Ok((report, written))
}
