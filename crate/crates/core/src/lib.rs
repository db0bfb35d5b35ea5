//! Healthcare claims fraud detection.
//!
//! The pipeline ingests a four-table claims schema, engineers claim- or
//! provider-level features, trains supervised baselines (logistic regression,
//! random forest) and reconstruction-error detectors (PCA, a dense
//! autoencoder trained on non-fraud rows only), and evaluates every model with
//! confusion-matrix metrics, ROC/AUC, Cohen's kappa and threshold sweeps.

pub mod autoencoder;
pub mod dimensionality;
pub mod features;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod supervised;
pub mod synth;

#[cfg(test)]
mod testutil;
