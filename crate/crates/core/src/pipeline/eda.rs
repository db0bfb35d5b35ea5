use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{PipelineConfig, PipelineError};
use crate::features::{
    age_band_fraud_rates, fraud_proportion, provider_fraud_proportion, top_codes_by_amount,
    AgeBandRate, CodeTotal,
};
use crate::ingest::{JoinReport, MergedDataset, SourceCounts};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportions {
    pub non_fraud_percent: f64,
    pub fraud_percent: f64,
}

impl From<(f64, f64)> for Proportions {
    fn from((non_fraud_percent, fraud_percent): (f64, f64)) -> Self {
        Proportions {
            non_fraud_percent,
            fraud_percent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FraudProportions {
    pub claims: Proportions,
    pub providers: Proportions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeOutlier {
    pub provider_id: String,
    pub claim_count: usize,
    pub potential_fraud: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeOutliers {
    pub mean_claims: f64,
    pub std_claims: f64,
    /// Providers with more than mean + 3σ claims are listed.
    pub cutoff: f64,
    pub providers: Vec<VolumeOutlier>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdaReport {
    pub rows: usize,
    pub source_counts: SourceCounts,
    pub join_report: JoinReport,
    pub fraud_proportions: FraudProportions,
    pub top_codes_by_amount: Vec<CodeTotal>,
    pub age_band_fraud_rates: Vec<AgeBandRate>,
    pub volume_outliers: VolumeOutliers,
}

pub fn volume_outliers(dataset: &MergedDataset) -> VolumeOutliers {
    let mut counts: BTreeMap<&str, (usize, bool)> = BTreeMap::new();
    for r in &dataset.rows {
        let e = counts
            .entry(&r.claim.provider_id)
            .or_insert((0, r.potential_fraud));
        e.0 += 1;
    }
    let n = counts.len().max(1) as f64;
    let mean = counts.values().map(|c| c.0 as f64).sum::<f64>() / n;
    let var = counts
        .values()
        .map(|c| (c.0 as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    let cutoff = mean + 3.0 * std;
    let mut providers: Vec<VolumeOutlier> = counts
        .iter()
        .filter(|(_, c)| c.0 as f64 > cutoff)
        .map(|(p, c)| VolumeOutlier {
            provider_id: p.to_string(),
            claim_count: c.0,
            potential_fraud: c.1,
        })
        .collect();
    providers.sort_by(|a, b| {
        b.claim_count
            .cmp(&a.claim_count)
            .then_with(|| a.provider_id.cmp(&b.provider_id))
    });
    VolumeOutliers {
        mean_claims: mean,
        std_claims: std,
        cutoff,
        providers,
    }
}

pub fn eda_report(
    dataset: &MergedDataset,
    cfg: &PipelineConfig,
) -> Result<EdaReport, PipelineError> {
    Ok(EdaReport {
        rows: dataset.len(),
        source_counts: dataset.source_counts,
        join_report: dataset.join_report,
        fraud_proportions: FraudProportions {
            claims: fraud_proportion(dataset)?.into(),
            providers: provider_fraud_proportion(dataset)?.into(),
        },
        top_codes_by_amount: top_codes_by_amount(dataset, cfg.top_k)?,
        age_band_fraud_rates: age_band_fraud_rates(
            dataset,
            &cfg.age_bands,
            &cfg.feature_options(),
        )?,
        volume_outliers: volume_outliers(dataset),
    })
}
