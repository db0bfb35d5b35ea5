use std::collections::HashMap;
use std::sync::Arc;

use super::records::{
    BeneficiaryRecord, ClaimRecord, JoinReport, MergedDataset, MergedRow, ProviderLabel,
    SourceCounts,
};
use super::IngestError;

/// Inner-joins claims (inpatient first, then outpatient) to beneficiaries and
/// then to provider labels. Unmatched claims are dropped and counted.
pub fn merge_dataset(
    claims_ip: Vec<ClaimRecord>,
    claims_op: Vec<ClaimRecord>,
    beneficiaries: Vec<BeneficiaryRecord>,
    labels: &[ProviderLabel],
) -> Result<MergedDataset, IngestError> {
    let source_counts = SourceCounts {
        n_inpatient: claims_ip.len(),
        n_outpatient: claims_op.len(),
        n_beneficiaries: beneficiaries.len(),
        n_providers: labels.len(),
    };
    let benes: HashMap<String, Arc<BeneficiaryRecord>> = beneficiaries
        .into_iter()
        .map(|b| (b.beneficiary_id.clone(), Arc::new(b)))
        .collect();
    let fraud: HashMap<&str, bool> = labels
        .iter()
        .map(|l| (l.provider_id.as_str(), l.potential_fraud))
        .collect();

    let mut report = JoinReport::default();
    let mut rows = Vec::with_capacity(source_counts.n_inpatient + source_counts.n_outpatient);
    for claim in claims_ip.into_iter().chain(claims_op) {
        let Some(beneficiary) = benes.get(&claim.beneficiary_id) else {
            report.dropped_missing_beneficiary += 1;
            continue;
        };
        let Some(&potential_fraud) = fraud.get(claim.provider_id.as_str()) else {
            report.dropped_missing_label += 1;
            continue;
        };
        rows.push(MergedRow {
            claim,
            beneficiary: Arc::clone(beneficiary),
            potential_fraud,
        });
    }
    if rows.is_empty() {
        return Err(IngestError::EmptyJoinResult(report));
    }
    Ok(MergedDataset {
        rows,
        source_counts,
        join_report: report,
    })
}
