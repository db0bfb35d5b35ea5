//! Feature construction, standardization and exploratory statistics.

mod build;
mod eda;
mod grouping;
mod matrix;

use chrono::NaiveDate;
use thiserror::Error;

pub use build::{
    build_features, compute_age, feature_columns, raw_features, row_age, FeatureOptions,
};
pub use eda::{
    age_band_fraud_rates, fraud_proportion, provider_fraud_proportion, top_codes_by_amount,
    AgeBandRate, CodeTotal,
};
pub use grouping::{
    group_by_similarity, sparse_encode_codes, CodeField, GroupKey, SimilarityGroup,
    SparseCodeMatrix,
};
pub use matrix::{AnalysisUnit, ColumnScale, FeatureMatrix, FeatureSidecar, Standardization};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("reference date {reference} precedes date of birth {dob}")]
    ReferenceBeforeBirth {
        dob: NaiveDate,
        reference: NaiveDate,
    },
    #[error("unknown grouping key {0:?}")]
    UnknownKeyField(String),
    #[error("age band edges must be non-empty and strictly increasing: {0:?}")]
    NonMonotoneBands(Vec<u32>),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}
