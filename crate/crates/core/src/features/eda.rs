use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::build::{row_age, FeatureOptions};
use super::FeatureError;
use crate::ingest::{Cents, MergedDataset};

/// Percentages of rows labeled non-fraud and fraud.
pub fn fraud_proportion(dataset: &MergedDataset) -> Result<(f64, f64), FeatureError> {
    let n = dataset.len();
    if n == 0 {
        return Err(FeatureError::EmptyDataset);
    }
    let yes = dataset.rows.iter().filter(|r| r.potential_fraud).count();
    Ok((
        100.0 * (n - yes) as f64 / n as f64,
        100.0 * yes as f64 / n as f64,
    ))
}

/// Same split counted over distinct providers.
pub fn provider_fraud_proportion(dataset: &MergedDataset) -> Result<(f64, f64), FeatureError> {
    let mut seen = HashSet::new();
    let (mut n, mut yes) = (0usize, 0usize);
    for r in &dataset.rows {
        if seen.insert(r.claim.provider_id.as_str()) {
            n += 1;
            yes += usize::from(r.potential_fraud);
        }
    }
    if n == 0 {
        return Err(FeatureError::EmptyDataset);
    }
    Ok((
        100.0 * (n - yes) as f64 / n as f64,
        100.0 * yes as f64 / n as f64,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeTotal {
    pub code: String,
    pub total_reimbursed: Cents,
    pub fraud_count: usize,
    pub non_fraud_count: usize,
}

/// Diagnosis codes ranked by the summed reimbursement of the claims listing
/// them (each claim counted once per distinct code); ties go to the
/// lexicographically smaller code.
pub fn top_codes_by_amount(
    dataset: &MergedDataset,
    k: usize,
) -> Result<Vec<CodeTotal>, FeatureError> {
    if k == 0 {
        return Err(FeatureError::InvalidArgument("k must be at least 1".into()));
    }
    if dataset.is_empty() {
        return Err(FeatureError::EmptyDataset);
    }
    let mut totals: BTreeMap<&str, CodeTotal> = BTreeMap::new();
    for r in &dataset.rows {
        let distinct: HashSet<&str> = r.claim.diagnosis_codes.iter().map(String::as_str).collect();
        for code in distinct {
            let t = totals.entry(code).or_insert_with(|| CodeTotal {
                code: code.to_string(),
                total_reimbursed: Cents(0),
                fraud_count: 0,
                non_fraud_count: 0,
            });
            t.total_reimbursed.0 += r.claim.reimbursed_amount.0;
            if r.potential_fraud {
                t.fraud_count += 1;
            } else {
                t.non_fraud_count += 1;
            }
        }
    }
    let mut ranked: Vec<CodeTotal> = totals.into_values().collect();
    ranked.sort_by(|a, b| {
        b.total_reimbursed
            .cmp(&a.total_reimbursed)
            .then_with(|| a.code.cmp(&b.code))
    });
    ranked.truncate(k);
    Ok(ranked)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgeBandRate {
    pub lower: u32,
    /// Exclusive; `None` for the open top band.
    pub upper: Option<u32>,
    pub n: usize,
    pub fraud_rate: f64,
    pub empty: bool,
}

/// Fraud rate per age band. Edges `[a, b, c]` give bands `[a,b)`, `[b,c)`,
/// `[c,∞)`; rows younger than the first edge are not counted.
pub fn age_band_fraud_rates(
    dataset: &MergedDataset,
    edges: &[u32],
    opts: &FeatureOptions,
) -> Result<Vec<AgeBandRate>, FeatureError> {
    if edges.is_empty() || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FeatureError::NonMonotoneBands(edges.to_vec()));
    }
    let mut counts = vec![(0usize, 0usize); edges.len()];
    for r in &dataset.rows {
        let age = row_age(r, opts)?;
        let band = edges.partition_point(|&e| e <= age);
        if band == 0 {
            continue;
        }
        let c = &mut counts[band - 1];
        c.0 += 1;
        c.1 += usize::from(r.potential_fraud);
    }
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, &(n, fraud))| AgeBandRate {
            lower: edges[i],
            upper: edges.get(i + 1).copied(),
            n,
            fraud_rate: if n == 0 { 0.0 } else { fraud as f64 / n as f64 },
            empty: n == 0,
        })
        .collect())
}
