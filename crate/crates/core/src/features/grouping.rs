use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::ingest::{MergedDataset, MergedRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeField {
    Diagnosis,
    Procedure,
}

/// Binary claim × code incidence matrix stored as coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseCodeMatrix {
    pub n_rows: usize,
    pub code_vocabulary: Vec<String>,
    /// (row, column) pairs whose value is 1, sorted and unique.
    pub entries: Vec<(usize, usize)>,
}

impl SparseCodeMatrix {
    pub fn density(&self) -> f64 {
        let cells = self.n_rows * self.code_vocabulary.len();
        if cells == 0 {
            0.0
        } else {
            self.entries.len() as f64 / cells as f64
        }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.entries.binary_search(&(row, col)).is_ok()
    }
}

pub fn sparse_encode_codes(
    dataset: &MergedDataset,
    field: CodeField,
) -> Result<SparseCodeMatrix, FeatureError> {
    if dataset.is_empty() {
        return Err(FeatureError::EmptyDataset);
    }
    let codes = |r: &MergedRow| -> Vec<String> {
        match field {
            CodeField::Diagnosis => r.claim.diagnosis_codes.clone(),
            CodeField::Procedure => r.claim.procedure_codes.clone(),
        }
    };
    let vocab: BTreeSet<String> = dataset.rows.iter().flat_map(codes).collect();
    let index: BTreeMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let mut entries = Vec::new();
    for (row, r) in dataset.rows.iter().enumerate() {
        let cols: BTreeSet<usize> = codes(r).iter().map(|c| index[c.as_str()]).collect();
        entries.extend(cols.into_iter().map(|c| (row, c)));
    }
    Ok(SparseCodeMatrix {
        n_rows: dataset.len(),
        code_vocabulary: vocab.into_iter().collect(),
        entries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupKey {
    ProviderId,
    AttendingPhysician,
    FirstDiagnosisCode,
    ProcedureCode,
}

impl std::str::FromStr for GroupKey {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "provider_id" => Ok(GroupKey::ProviderId),
            "attending_physician" => Ok(GroupKey::AttendingPhysician),
            "first_diagnosis_code" => Ok(GroupKey::FirstDiagnosisCode),
            "procedure_code" => Ok(GroupKey::ProcedureCode),
            other => Err(FeatureError::UnknownKeyField(other.to_string())),
        }
    }
}

impl GroupKey {
    fn value(self, r: &MergedRow) -> String {
        let c = &r.claim;
        match self {
            GroupKey::ProviderId => Some(c.provider_id.clone()),
            GroupKey::AttendingPhysician => c.attending_physician.clone(),
            GroupKey::FirstDiagnosisCode => c.diagnosis_codes.first().cloned(),
            GroupKey::ProcedureCode => c.procedure_codes.first().cloned(),
        }
        .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityGroup {
    pub key: Vec<String>,
    pub rows: Vec<usize>,
    /// Population variance of reimbursed amounts, in dollars squared.
    pub amount_variance: f64,
}

/// Partitions rows by the given key fields, highest amount variance first.
/// Missing key values group under the empty string.
pub fn group_by_similarity(
    dataset: &MergedDataset,
    keys: &[&str],
) -> Result<Vec<SimilarityGroup>, FeatureError> {
    let keys: Vec<GroupKey> = keys.iter().map(|k| k.parse()).collect::<Result<_, _>>()?;
    let mut groups: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
    for (i, r) in dataset.rows.iter().enumerate() {
        let key = keys.iter().map(|k| k.value(r)).collect();
        groups.entry(key).or_default().push(i);
    }
    let mut out: Vec<SimilarityGroup> = groups
        .into_iter()
        .map(|(key, rows)| {
            let amounts: Vec<f64> = rows
                .iter()
                .map(|&i| dataset.rows[i].claim.reimbursed_amount.as_dollars())
                .collect();
            let n = amounts.len() as f64;
            let mean = amounts.iter().sum::<f64>() / n;
            let amount_variance = amounts.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
            SimilarityGroup {
                key,
                rows,
                amount_variance,
            }
        })
        .collect();
    // Stable sort keeps the key order for equal variances.
    out.sort_by(|a, b| b.amount_variance.total_cmp(&a.amount_variance));
    Ok(out)
}
