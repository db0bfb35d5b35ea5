use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::ingest::MergedDataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub test_fraction: f64,
    pub seed: u64,
    pub train_providers: usize,
    pub test_providers: usize,
    pub train_fraud_providers: usize,
    pub test_fraud_providers: usize,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Provider-stratified split: every claim of a provider lands on the same
/// side, and fraud and clean providers are shuffled and divided separately.
pub fn split(
    dataset: &MergedDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(MergedDataset, MergedDataset, SplitSummary), PipelineError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(PipelineError::Config(format!(
            "test_fraction {test_fraction} outside (0, 1)"
        )));
    }
    let mut label: BTreeMap<&str, bool> = BTreeMap::new();
    for r in &dataset.rows {
        label.insert(&r.claim.provider_id, r.potential_fraud);
    }
    let mut fraud: Vec<&str> = label.iter().filter(|(_, &f)| f).map(|(&p, _)| p).collect();
    let mut clean: Vec<&str> = label.iter().filter(|(_, &f)| !f).map(|(&p, _)| p).collect();
    if fraud.len() < 2 || clean.len() < 2 {
        return Err(PipelineError::TooFewProviders {
            fraud: fraud.len(),
            clean: clean.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test: HashSet<String> = HashSet::new();
    for group in [&mut fraud, &mut clean] {
        group.shuffle(&mut rng);
        let n = group.len();
        let k = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        test.extend(group[..k].iter().map(|s| s.to_string()));
    }
    let test_fraud = fraud.iter().filter(|p| test.contains(**p)).count();
    let test_ds = dataset.filter_providers(|p| test.contains(p));
    let train_ds = dataset.filter_providers(|p| !test.contains(p));
    let summary = SplitSummary {
        test_fraction,
        seed,
        train_providers: label.len() - test.len(),
        test_providers: test.len(),
        train_fraud_providers: fraud.len() - test_fraud,
        test_fraud_providers: test_fraud,
        train_rows: train_ds.len(),
        test_rows: test_ds.len(),
    };
    Ok((train_ds, test_ds, summary))
}
