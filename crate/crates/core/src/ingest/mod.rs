//! Parsing, validation and joining of the four-table claims schema:
//! beneficiaries, inpatient claims, outpatient claims and provider labels.

mod merge;
mod parse;
mod records;
mod schema;
mod write;

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use merge::merge_dataset;
pub use parse::{parse_beneficiaries, parse_claims, parse_date, parse_labels};
pub use records::{
    BeneficiaryRecord, Cents, ClaimRecord, JoinReport, MergedDataset, MergedRow, ProviderLabel,
    Setting, SourceCounts, CHRONIC_CONDITIONS, MAX_DIAGNOSIS_CODES, MAX_PROCEDURE_CODES,
};
pub use schema::{BeneficiaryColumns, ClaimColumns, LabelColumns, Schema};
pub use write::{read_canonical, write_beneficiaries, write_canonical, write_claims, write_labels};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("row {row}: cannot parse date {value:?} in column {column}")]
    UnparseableDate {
        row: usize,
        column: String,
        value: String,
    },
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("row {row}: negative amount in column {column}")]
    NegativeAmount { row: usize, column: String },
    #[error("row {row}: cannot parse amount {value:?} in column {column}")]
    InvalidAmount {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}: unknown flag value {text:?}")]
    UnknownFlagValue { row: usize, text: String },
    #[error("row {row}: {reason}")]
    InvalidRecord { row: usize, reason: String },
    #[error("join produced no rows ({} claims without beneficiary, {} without provider label)",
        .0.dropped_missing_beneficiary, .0.dropped_missing_label)]
    EmptyJoinResult(JoinReport),
    #[error("{} row errors, first: {}", .0.len(), .0[0])]
    Many(Vec<IngestError>),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Paths of the four input tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFiles {
    pub beneficiaries: PathBuf,
    pub inpatient: PathBuf,
    pub outpatient: PathBuf,
    pub labels: PathBuf,
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Parses and merges the four tables from disk.
pub fn load_dataset(files: &SourceFiles, schema: &Schema) -> Result<MergedDataset, IngestError> {
    let beneficiaries = parse_beneficiaries(open(&files.beneficiaries)?, &schema.beneficiary)?;
    let inpatient = parse_claims(open(&files.inpatient)?, Setting::Inpatient, &schema.claims)?;
    let outpatient = parse_claims(
        open(&files.outpatient)?,
        Setting::Outpatient,
        &schema.claims,
    )?;
    let labels = parse_labels(open(&files.labels)?, &schema.labels)?;
    merge_dataset(inpatient, outpatient, beneficiaries, &labels)
}
