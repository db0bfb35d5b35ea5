use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::{Datelike, NaiveDate};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::matrix::{AnalysisUnit, FeatureMatrix};
use super::FeatureError;
use crate::ingest::{MergedDataset, MergedRow, Setting, CHRONIC_CONDITIONS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureOptions {
    /// Age reference for living beneficiaries.
    pub reference_date: NaiveDate,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            reference_date: NaiveDate::from_ymd_opt(2009, 12, 1).unwrap(),
        }
    }
}

/// Completed calendar years between `dob` and `reference`.
pub fn compute_age(dob: NaiveDate, reference: NaiveDate) -> Result<u32, FeatureError> {
    if reference < dob {
        return Err(FeatureError::ReferenceBeforeBirth { dob, reference });
    }
    let mut years = reference.year() - dob.year();
    if (reference.month(), reference.day()) < (dob.month(), dob.day()) {
        years -= 1;
    }
    Ok(years as u32)
}

/// Age at date of death when known, else at the reference date.
pub fn row_age(row: &MergedRow, opts: &FeatureOptions) -> Result<u32, FeatureError> {
    let b = &row.beneficiary;
    compute_age(
        b.date_of_birth,
        b.date_of_death.unwrap_or(opts.reference_date),
    )
}

fn is_post_death(row: &MergedRow) -> bool {
    row.beneficiary
        .date_of_death
        .is_some_and(|d| row.claim.claim_start > d)
}

/// Number of other claims in the dataset with the same provider, beneficiary,
/// amount and diagnosis codes.
fn duplicate_counts(dataset: &MergedDataset) -> Vec<usize> {
    let key = |r: &MergedRow| {
        (
            r.claim.provider_id.clone(),
            r.claim.beneficiary_id.clone(),
            r.claim.reimbursed_amount,
            r.claim.diagnosis_codes.join("|"),
        )
    };
    let mut counts: HashMap<_, usize> = HashMap::new();
    for r in &dataset.rows {
        *counts.entry(key(r)).or_default() += 1;
    }
    dataset.rows.iter().map(|r| counts[&key(r)] - 1).collect()
}

#[derive(Default)]
struct ProviderAcc<'a> {
    claims: usize,
    beneficiaries: HashSet<&'a str>,
    attending: HashSet<&'a str>,
    sum: f64,
    max: f64,
    duration: f64,
    inpatient: usize,
    duplicates: usize,
    post_death: usize,
    fraud: bool,
}

const PROVIDER_COLUMNS: [&str; 10] = [
    "claim_count",
    "distinct_beneficiaries",
    "distinct_attending",
    "sum_reimbursed",
    "mean_reimbursed",
    "max_reimbursed",
    "mean_claim_duration",
    "inpatient_share",
    "duplicate_share",
    "post_death_share",
];

impl ProviderAcc<'_> {
    fn features(&self) -> [f64; 10] {
        let n = self.claims as f64;
        [
            n,
            self.beneficiaries.len() as f64,
            self.attending.len() as f64,
            self.sum,
            self.sum / n,
            self.max,
            self.duration / n,
            self.inpatient as f64 / n,
            self.duplicates as f64 / n,
            self.post_death as f64 / n,
        ]
    }
}

/// Per-provider aggregates keyed by provider id, sorted by id.
fn provider_aggregates<'a>(
    dataset: &'a MergedDataset,
    dups: &[usize],
) -> BTreeMap<&'a str, ProviderAcc<'a>> {
    let mut acc: BTreeMap<&str, ProviderAcc> = BTreeMap::new();
    for (r, &dup) in dataset.rows.iter().zip(dups) {
        let a = acc.entry(r.claim.provider_id.as_str()).or_default();
        let amount = r.claim.reimbursed_amount.as_dollars();
        a.claims += 1;
        a.beneficiaries.insert(&r.claim.beneficiary_id);
        if let Some(p) = &r.claim.attending_physician {
            a.attending.insert(p);
        }
        a.sum += amount;
        a.max = a.max.max(amount);
        a.duration += r.claim.duration_days() as f64;
        a.inpatient += usize::from(r.claim.setting == Setting::Inpatient);
        a.duplicates += usize::from(dup > 0);
        a.post_death += usize::from(is_post_death(r));
        a.fraud = r.potential_fraud;
    }
    acc
}

/// Column names produced by [`raw_features`] for a unit.
pub fn feature_columns(unit: AnalysisUnit) -> Vec<String> {
    match unit {
        AnalysisUnit::Provider => PROVIDER_COLUMNS.iter().map(|s| s.to_string()).collect(),
        AnalysisUnit::Claim => {
            let mut cols: Vec<String> = [
                "age",
                "claim_duration_days",
                "admission_days",
                "has_admission",
                "reimbursed_amount",
                "deductible_paid",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            cols.extend(CHRONIC_CONDITIONS.iter().map(|c| format!("chronic_{c}")));
            cols.extend(
                [
                    "n_diagnosis_codes",
                    "n_procedure_codes",
                    "is_inpatient",
                    "days_after_death",
                    "duplicate_count",
                ]
                .iter()
                .map(|s| s.to_string()),
            );
            cols.extend(PROVIDER_COLUMNS.iter().map(|c| format!("provider_{c}")));
            cols
        }
    }
}

/// Unstandardized features. Claim rows follow dataset order; provider rows
/// are sorted by provider id.
pub fn raw_features(
    dataset: &MergedDataset,
    unit: AnalysisUnit,
    opts: &FeatureOptions,
) -> Result<FeatureMatrix, FeatureError> {
    if dataset.is_empty() {
        return Err(FeatureError::EmptyDataset);
    }
    let dups = duplicate_counts(dataset);
    let providers = provider_aggregates(dataset, &dups);
    let columns = feature_columns(unit);
    match unit {
        AnalysisUnit::Provider => {
            let mut values = Array2::zeros((providers.len(), columns.len()));
            let mut target = Vec::with_capacity(providers.len());
            let mut ids = Vec::with_capacity(providers.len());
            for (i, (id, acc)) in providers.iter().enumerate() {
                for (j, v) in acc.features().into_iter().enumerate() {
                    values[[i, j]] = v;
                }
                target.push(acc.fraud);
                ids.push(id.to_string());
            }
            FeatureMatrix::new(values, columns, target, ids, unit)
        }
        AnalysisUnit::Claim => {
            let n = dataset.len();
            let mut values = Array2::zeros((n, columns.len()));
            for (i, (r, &dup)) in dataset.rows.iter().zip(&dups).enumerate() {
                let c = &r.claim;
                let admission = c.admission_days();
                let days_after_death = r
                    .beneficiary
                    .date_of_death
                    .map_or(0, |d| (c.claim_start - d).num_days().max(0));
                let mut row = vec![
                    row_age(r, opts)? as f64,
                    c.duration_days() as f64,
                    admission.unwrap_or(0) as f64,
                    f64::from(u8::from(admission.is_some())),
                    c.reimbursed_amount.as_dollars(),
                    c.deductible_paid.as_dollars(),
                ];
                row.extend(
                    r.beneficiary
                        .chronic_conditions
                        .iter()
                        .map(|&f| f64::from(u8::from(f))),
                );
                row.extend([
                    c.diagnosis_codes.len() as f64,
                    c.procedure_codes.len() as f64,
                    f64::from(u8::from(c.setting == Setting::Inpatient)),
                    days_after_death as f64,
                    dup as f64,
                ]);
                row.extend(providers[c.provider_id.as_str()].features());
                for (j, v) in row.into_iter().enumerate() {
                    values[[i, j]] = v;
                }
            }
            FeatureMatrix::new(
                values,
                columns,
                dataset.rows.iter().map(|r| r.potential_fraud).collect(),
                dataset
                    .rows
                    .iter()
                    .map(|r| r.claim.claim_id.clone())
                    .collect(),
                unit,
            )
        }
    }
}

/// Features standardized over this dataset, with parameters recorded.
pub fn build_features(
    dataset: &MergedDataset,
    unit: AnalysisUnit,
    opts: &FeatureOptions,
) -> Result<FeatureMatrix, FeatureError> {
    let mut m = raw_features(dataset, unit, opts)?;
    m.standardize();
    Ok(m)
}
